//! Amplitude vectors for prime-derived series and every density-matrix
//! construction: the exact reduced matrix from the psi bit-matrix, the
//! odd-residue block, the Hardy-Littlewood model matrix and its Toeplitz
//! kernel, arbitrary-mask partial traces, and the rank-one toy matrix.
//!
//! Basis convention for "full" flavor matrices: residues are ordered even
//! ascending then odd ascending, `a = (0, 2, ..., 2^m - 2; 1, 3, ..., 2^m - 1)`,
//! which makes the worked 8x8 example matrix reproducible entry by entry.

use std::collections::HashMap;

use serde::Serialize;

use crate::counting::{li, li2};
use crate::error::{Error, Result};
use crate::hardylittlewood::HlConstants;
use crate::primes::PrimeTable;

/// Which arithmetic series an amplitude vector encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Series {
    /// All primes below 2^n, equal weights.
    Prime,
    /// 2 together with every p < 2^n such that p + 2 is prime.
    Twin,
    /// p < 2^n such that p + 2 and p + 6 are both prime.
    Triplet,
    /// Signs mu(a) over square-free a.
    Moebius,
    /// The uniform superposition.
    Hadamard,
}

/// A normalized real amplitude vector over basis indices 0 .. 2^n - 1,
/// stored sparsely (index, amplitude) for the nonzero entries.
pub struct AmplitudeVector {
    n: u32,
    series: Series,
    norm_constant: u64,
    entries: Vec<(u64, f64)>,
}

impl AmplitudeVector {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn series(&self) -> Series {
        self.series
    }

    /// The integer normalizer: pi(2^n), the twin/triplet member count, the
    /// square-free count C_mu, or 2^n for the Hadamard state.
    pub fn norm_constant(&self) -> u64 {
        self.norm_constant
    }

    /// Nonzero (index, amplitude) pairs, sorted by index.
    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn amplitude(&self, index: u64) -> f64 {
        match self.entries.binary_search_by_key(&index, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => 0.0,
        }
    }

    /// Sum of squared amplitudes; 1 within 1e-12 by construction.
    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v * v).sum()
    }

    /// Inner product with another state of the same n.
    pub fn dot(&self, other: &AmplitudeVector) -> f64 {
        assert_eq!(self.n, other.n, "states live on different qubit counts");
        // Merge the two sorted sparse lists.
        let (mut i, mut j, mut acc) = (0usize, 0usize, 0.0f64);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.entries[i].1 * other.entries[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }
}

/// Build the normalized state for a series at n qubits.
pub fn build_state(table: &PrimeTable, n: u32, series: Series) -> Result<AmplitudeVector> {
    if n > table.n() {
        return Err(Error::Range(format!("state n={n} exceeds sieve n={}", table.n())));
    }
    let limit = 1u64 << n;
    let members: Vec<u64> = match series {
        Series::Prime => table.primes_below(limit).collect(),
        Series::Twin => {
            // The even prime is a member; see the series documentation.
            let mut v = vec![2u64];
            v.extend(table.primes_below(limit).filter(|&p| p > 2 && table.is_prime(p + 2)));
            v
        }
        Series::Triplet => table
            .primes_below(limit)
            .filter(|&p| table.is_prime(p + 2) && table.is_prime(p + 6))
            .collect(),
        Series::Moebius => (1..limit).filter(|&a| table.mu(a) != 0).collect(),
        Series::Hadamard => (0..limit).collect(),
    };
    if members.is_empty() {
        return Err(Error::Domain(format!("series {series:?} empty below 2^{n}")));
    }
    let count = members.len() as u64;
    let w = 1.0 / (count as f64).sqrt();
    let entries = members
        .into_iter()
        .map(|a| {
            let amp = match series {
                Series::Moebius => table.mu(a) as f64 * w,
                _ => w,
            };
            (a, amp)
        })
        .collect();
    Ok(AmplitudeVector { n, series, norm_constant: count, entries })
}

/// A bipartition: the qubit positions belonging to block A (low bit = 2^0).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMask {
    n: u32,
    a_bits: Vec<u32>,
}

impl PartitionMask {
    pub fn new(n: u32, mut a_bits: Vec<u32>) -> Result<PartitionMask> {
        a_bits.sort_unstable();
        a_bits.dedup();
        if a_bits.is_empty() || a_bits.len() >= n as usize {
            return Err(Error::Domain("partition blocks A and B must both be non-empty".into()));
        }
        if a_bits.iter().any(|&b| b >= n) {
            return Err(Error::Domain("mask bit beyond qubit count".into()));
        }
        Ok(PartitionMask { n, a_bits })
    }

    /// The natural partition: the lowest m bits.
    pub fn natural(n: u32, m: u32) -> Result<PartitionMask> {
        PartitionMask::new(n, (0..m).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a_bits(&self) -> &[u32] {
        &self.a_bits
    }

    /// The complementary mask (block B).
    pub fn complement(&self) -> PartitionMask {
        let bits = (0..self.n).filter(|b| !self.a_bits.contains(b)).collect();
        PartitionMask { n: self.n, a_bits: bits }
    }

    /// Bitmask form, for compact reporting.
    pub fn bit_pattern(&self) -> u64 {
        self.a_bits.iter().fold(0u64, |acc, &b| acc | 1u64 << b)
    }
}

/// Which construction produced a density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Flavor {
    Full,
    Truncated,
    Odd,
    Model,
    Toy,
}

/// Real symmetric unit-trace matrix with basis labels.
pub struct DensityMatrix {
    dim: usize,
    data: Vec<f64>,
    labels: Vec<u64>,
    flavor: Flavor,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Basis label (residue value) per row/column position.
    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    /// Row-major dense storage.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i)).sum()
    }

    /// Tr rho^2 from the entries (Frobenius norm squared, by symmetry).
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    fn from_parts(dim: usize, data: Vec<f64>, labels: Vec<u64>, flavor: Flavor) -> DensityMatrix {
        debug_assert_eq!(data.len(), dim * dim);
        debug_assert_eq!(labels.len(), dim);
        DensityMatrix { dim, data, labels, flavor }
    }
}

/// Position of residue `a` in the even-then-odd basis ordering of a
/// k-qubit block.
pub fn even_odd_index(a: u64, k: u32) -> usize {
    debug_assert!(a < 1u64 << k);
    if a % 2 == 0 {
        (a / 2) as usize
    } else {
        (1usize << (k - 1)) + ((a - 1) / 2) as usize
    }
}

fn even_odd_labels(k: u32) -> Vec<u64> {
    let half = 1u64 << (k - 1);
    (0..half).map(|i| 2 * i).chain((0..half).map(|i| 2 * i + 1)).collect()
}

/// The binary matrix psi[b][a] = 1 iff a + 2^m b is prime, with both rows
/// and columns in even/odd order.
pub struct PsiMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major 0/1 entries.
    pub data: Vec<u8>,
    /// High-bit value per row position.
    pub row_labels: Vec<u64>,
    /// Residue value per column position.
    pub col_labels: Vec<u64>,
}

pub fn psi_matrix(table: &PrimeTable, n: u32, m: u32) -> Result<PsiMatrix> {
    check_split(table, n, m)?;
    let rows = 1usize << (n - m);
    let cols = 1usize << m;
    let mut data = vec![0u8; rows * cols];
    for b in 0..rows as u64 {
        let r = even_odd_index(b, n - m);
        for a in 0..cols as u64 {
            if table.is_prime(a + (b << m)) {
                data[r * cols + even_odd_index(a, m)] = 1;
            }
        }
    }
    Ok(PsiMatrix {
        rows,
        cols,
        data,
        row_labels: even_odd_labels(n - m),
        col_labels: even_odd_labels(m),
    })
}

fn check_split(table: &PrimeTable, n: u32, m: u32) -> Result<()> {
    if n > table.n() {
        return Err(Error::Range(format!("n={n} exceeds sieve n={}", table.n())));
    }
    if m < 1 || m >= n {
        return Err(Error::Domain(format!("low-bit count m={m} not in 1..n={n}")));
    }
    Ok(())
}

/// Exact reduced density matrix of the prime state under the natural
/// partition: psi^T psi / pi(2^n) in the even/odd basis ordering.
pub fn rho_exact(table: &PrimeTable, n: u32, m: u32) -> Result<DensityMatrix> {
    check_split(table, n, m)?;
    let dim = 1usize << m;
    let mut counts = vec![0u32; dim * dim];
    let rows = 1u64 << (n - m);
    let mut row_hits: Vec<usize> = Vec::new();
    for b in 0..rows {
        row_hits.clear();
        let base = b << m;
        // Even residues only ever contribute a = 2 (the prime 2 at b = 0).
        if b == 0 && m >= 2 {
            row_hits.push(even_odd_index(2, m));
        }
        if m == 1 && table.is_prime(base) {
            row_hits.push(even_odd_index(0, m));
        }
        for a in (1..1u64 << m).step_by(2) {
            if table.is_prime(base + a) {
                row_hits.push(even_odd_index(a, m));
            }
        }
        for &i in &row_hits {
            let row = &mut counts[i * dim..(i + 1) * dim];
            for &j in &row_hits {
                row[j] += 1;
            }
        }
    }
    let norm = table.count_primes_leq(1u64 << n) as f64;
    let data = counts.iter().map(|&c| c as f64 / norm).collect();
    Ok(DensityMatrix::from_parts(dim, data, even_odd_labels(m), Flavor::Full))
}

/// The 2^{m-1}+1 dimensional truncation to labels (2, odd): same entries as
/// the full matrix with the identically-zero even rows removed.
pub fn rho_truncated(table: &PrimeTable, n: u32, m: u32) -> Result<DensityMatrix> {
    check_split(table, n, m)?;
    if m < 2 {
        return Err(Error::Domain("truncated flavor needs m >= 2".into()));
    }
    let full = rho_exact(table, n, m)?;
    let keep: Vec<usize> = std::iter::once(even_odd_index(2, m))
        .chain((1..1u64 << m).step_by(2).map(|a| even_odd_index(a, m)))
        .collect();
    let dim = keep.len();
    let mut data = vec![0.0; dim * dim];
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            data[r * dim + c] = full.entry(i, j);
        }
    }
    let labels = keep.iter().map(|&i| full.labels()[i]).collect();
    Ok(DensityMatrix::from_parts(dim, data, labels, Flavor::Truncated))
}

/// Density matrix of the odd-prime state: counting-function entries over the
/// odd residues with denominator pi(N) - 1.
pub fn rho_odd(table: &PrimeTable, n: u32, m: u32) -> Result<DensityMatrix> {
    check_split(table, n, m)?;
    if m < 2 {
        return Err(Error::Domain("odd flavor needs m >= 2".into()));
    }
    let dim = 1usize << (m - 1);
    let mut counts = vec![0u32; dim * dim];
    let rows = 1u64 << (n - m);
    let mut row_hits: Vec<usize> = Vec::new();
    for b in 0..rows {
        row_hits.clear();
        let base = b << m;
        for a in (1..1u64 << m).step_by(2) {
            if table.is_prime(base + a) {
                row_hits.push(((a - 1) / 2) as usize);
            }
        }
        for &i in &row_hits {
            let row = &mut counts[i * dim..(i + 1) * dim];
            for &j in &row_hits {
                row[j] += 1;
            }
        }
    }
    let norm = (table.count_primes_leq(1u64 << n) - 1) as f64;
    let data = counts.iter().map(|&c| c as f64 / norm).collect();
    let labels = (0..dim as u64).map(|i| 2 * i + 1).collect();
    Ok(DensityMatrix::from_parts(dim, data, labels, Flavor::Odd))
}

/// How to evaluate the pair-density ratio ell_N = Li2(N)/Li(N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum EllMode {
    /// Quadrature of the two integrals at N = 2^n.
    ExactLiRatio,
    /// The asymptotic limit 1/(n ln 2).
    LimitOneOverNLog2,
}

pub fn ell(n: u32, mode: EllMode) -> Result<f64> {
    match mode {
        EllMode::ExactLiRatio => {
            let big_n = (1u64 << n) as f64;
            Ok(li2(big_n)? / li(big_n)?)
        }
        EllMode::LimitOneOverNLog2 => Ok(1.0 / (n as f64 * std::f64::consts::LN_2)),
    }
}

/// The Hardy-Littlewood model matrix (1/d)(1 + ell_N C_m), d = 2^{m-1}.
pub fn rho_model(hl: &HlConstants, n: u32, m: u32, mode: EllMode) -> Result<DensityMatrix> {
    if m < 2 || m >= n {
        return Err(Error::Domain(format!("model flavor needs 2 <= m < n, got m={m} n={n}")));
    }
    let d = 1usize << (m - 1);
    let ell_n = ell(n, mode)?;
    let inv_d = 1.0 / d as f64;
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            data[i * d + j] = if i == j {
                inv_d
            } else {
                ell_n * hl.c(2 * i.abs_diff(j) as u64) * inv_d
            };
        }
    }
    let labels = (0..d as u64).map(|i| 2 * i + 1).collect();
    Ok(DensityMatrix::from_parts(d, data, labels, Flavor::Model))
}

/// The zero-diagonal Toeplitz kernel (C_m)_{ij} = (1 - delta_ij) C(2|i-j|),
/// dense row-major with dim 2^{m-1}.
pub fn toeplitz_c(hl: &HlConstants, m: u32) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::Domain("toeplitz_c needs m >= 2".into()));
    }
    let d = 1usize << (m - 1);
    let band: Vec<f64> = (0..d).map(|g| hl.c(2 * g as u64)).collect();
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            if i != j {
                data[i * d + j] = band[i.abs_diff(j)];
            }
        }
    }
    Ok(data)
}

/// Partial trace of |state><state| onto the qubits in the mask, with the
/// block basis in even/odd order (so the natural mask reproduces rho_exact
/// entrywise).
pub fn reduce_mask(state: &AmplitudeVector, mask: &PartitionMask) -> Result<DensityMatrix> {
    if mask.n() != state.n() {
        return Err(Error::Domain("mask qubit count differs from state".into()));
    }
    let k = mask.a_bits.len() as u32;
    let dim = 1usize << k;
    let b_bits: Vec<u32> = mask.complement().a_bits;
    // Bucket the nonzero amplitudes by the B-side bit pattern.
    let mut groups: HashMap<u64, Vec<(usize, f64)>> = HashMap::new();
    for &(idx, amp) in state.entries() {
        let a_val = extract_bits(idx, &mask.a_bits);
        let b_val = extract_bits(idx, &b_bits);
        groups.entry(b_val).or_default().push((even_odd_index(a_val, k), amp));
    }
    let mut data = vec![0.0f64; dim * dim];
    for members in groups.values() {
        for &(i, vi) in members {
            let row = &mut data[i * dim..(i + 1) * dim];
            for &(j, vj) in members {
                row[j] += vi * vj;
            }
        }
    }
    Ok(DensityMatrix::from_parts(dim, data, even_odd_labels(k), Flavor::Full))
}

fn extract_bits(idx: u64, bits: &[u32]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (pos, &b)| acc | ((idx >> b) & 1) << pos)
}

/// The toy matrix (1/d)(1 + c P) with P the all-ones off-diagonal pattern;
/// spectrum {(1 + c(d-1))/d} once and {(1-c)/d} with multiplicity d-1.
pub fn toy_rho(d: usize, c: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::Domain("toy matrix needs d >= 2".into()));
    }
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::Domain(format!("coupling c={c} outside [0, 1]")));
    }
    let inv_d = 1.0 / d as f64;
    let mut data = vec![c * inv_d; d * d];
    for i in 0..d {
        data[i * d + i] = inv_d;
    }
    Ok(DensityMatrix::from_parts(d, data, (0..d as u64).collect(), Flavor::Toy))
}

/// Overlap of the Hadamard and Moebius states, <H_n | mu_n>.
pub fn mertens_overlap(table: &PrimeTable, n: u32) -> Result<f64> {
    let h = build_state(table, n, Series::Hadamard)?;
    let mu = build_state(table, n, Series::Moebius)?;
    Ok(h.dot(&mu))
}

/// The integer recovered from the overlap: round(<H|mu> 2^{n/2} sqrt(C_mu)),
/// which equals the Mertens sum M(2^n) (n >= 2).
pub fn mertens_overlap_recovered(table: &PrimeTable, n: u32) -> Result<i64> {
    let mu = build_state(table, n, Series::Moebius)?;
    let ov = mertens_overlap(table, n)?;
    let scale = ((1u64 << n) as f64).sqrt() * (mu.norm_constant() as f64).sqrt();
    Ok((ov * scale).round() as i64)
}

/// Partial Dirichlet normalization sum_{a < 2^n} a^{-2 sigma}; increases
/// with n toward zeta(2 sigma) for sigma > 1/2.
pub fn dirichlet_norm(n: u32, sigma: f64) -> Result<f64> {
    if sigma <= 0.5 {
        return Err(Error::Domain(format!("dirichlet_norm diverges at sigma={sigma} <= 1/2")));
    }
    if n > 30 {
        return Err(Error::Range("dirichlet_norm supports n <= 30".into()));
    }
    Ok((1..1u64 << n).map(|a| (a as f64).powf(-2.0 * sigma)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u32) -> PrimeTable {
        PrimeTable::build(n).unwrap()
    }

    #[test]
    fn state_members() {
        let t = table(6);
        let p = build_state(&t, 4, Series::Prime).unwrap();
        assert_eq!(p.norm_constant(), 6);
        let idx: Vec<u64> = p.entries().iter().map(|e| e.0).collect();
        assert_eq!(idx, vec![2, 3, 5, 7, 11, 13]);
        assert!((p.amplitude(2) - 1.0 / 6f64.sqrt()).abs() < 1e-15);
        assert!((p.norm_sq() - 1.0).abs() < 1e-12);

        let tw = build_state(&t, 4, Series::Twin).unwrap();
        let idx: Vec<u64> = tw.entries().iter().map(|e| e.0).collect();
        assert_eq!(idx, vec![2, 3, 5, 11]); // 13 excluded: 15 is composite

        let h = build_state(&t, 2, Series::Hadamard).unwrap();
        assert_eq!(h.entries().len(), 4);
        assert!(h.entries().iter().all(|&(_, v)| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn psi_matrix_6_3() {
        let t = table(6);
        let psi = psi_matrix(&t, 6, 3).unwrap();
        assert_eq!((psi.rows, psi.cols), (8, 8));
        assert_eq!(psi.col_labels, vec![0, 2, 4, 6, 1, 3, 5, 7]);
        let expected: [[u8; 8]; 8] = [
            [0, 1, 0, 0, 0, 1, 1, 1],
            [0, 0, 0, 0, 1, 1, 0, 1],
            [0, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 0, 1, 0],
            [0, 0, 0, 0, 0, 1, 1, 0],
            [0, 0, 0, 0, 0, 0, 1, 1],
            [0, 0, 0, 0, 1, 1, 0, 1],
            [0, 0, 0, 0, 0, 1, 1, 0],
        ];
        for b in 0..8 {
            for a in 0..8 {
                assert_eq!(psi.data[b * 8 + a], expected[b][a], "psi[{b}][{a}]");
            }
        }
        // Column a=2 has a single 1 (the prime 2 itself at b=0).
        let col2 = even_odd_index(2, 3);
        let ones: u8 = (0..8).map(|b| psi.data[b * 8 + col2]).sum();
        assert_eq!(ones, 1);
        // All entries sum to pi(2^6).
        let total: u32 = psi.data.iter().map(|&v| v as u32).sum();
        assert_eq!(total, 18);
    }

    #[test]
    fn rho_exact_6_3_matches_worked_example() {
        let t = table(6);
        let rho = rho_exact(&t, 6, 3).unwrap();
        let expected: [[f64; 8]; 8] = [
            [0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 1., 0., 0., 0., 1., 1., 1.],
            [0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 0., 0., 0., 0.],
            [0., 0., 0., 0., 2., 2., 0., 2.],
            [0., 1., 0., 0., 2., 5., 3., 3.],
            [0., 1., 0., 0., 0., 3., 6., 2.],
            [0., 1., 0., 0., 2., 3., 2., 4.],
        ];
        for i in 0..8 {
            for j in 0..8 {
                assert_eq!(rho.entry(i, j), expected[i][j] / 18.0, "rho[{i}][{j}]");
            }
        }
        assert!((rho.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rho_exact_m1() {
        let t = table(4);
        let rho = rho_exact(&t, 4, 1).unwrap();
        assert_eq!(rho.dim(), 2);
        assert!((rho.entry(0, 0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((rho.entry(0, 1) - 1.0 / 6.0).abs() < 1e-15);
        assert!((rho.entry(1, 1) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn rho_exact_matches_counting_formula() {
        use crate::counting::{pi, pi_ab, pi_abb};
        for (n, m) in [(8u32, 3u32), (10, 4), (12, 5), (16, 6)] {
            let t = table(n);
            let rho = rho_exact(&t, n, m).unwrap();
            let pi_n = pi(&t, 1 << n).unwrap() as f64;
            let big_m = 1u64 << m;
            for (i, &a) in rho.labels().iter().enumerate() {
                for (j, &a2) in rho.labels().iter().enumerate() {
                    let num = if a % 2 == 0 && a2 % 2 == 0 {
                        if a == 2 && a2 == 2 {
                            1.0
                        } else {
                            0.0
                        }
                    } else if a == 2 {
                        if t.is_prime(a2) {
                            1.0
                        } else {
                            0.0
                        }
                    } else if a2 == 2 {
                        if t.is_prime(a) {
                            1.0
                        } else {
                            0.0
                        }
                    } else if a % 2 == 0 || a2 % 2 == 0 {
                        0.0
                    } else if a == a2 {
                        pi_ab(&t, big_m, a, 1 << n).unwrap() as f64
                    } else {
                        pi_abb(&t, big_m, a, a2, 1 << n).unwrap() as f64
                    };
                    assert!(
                        (rho.entry(i, j) - num / pi_n).abs() < 1e-14,
                        "({n},{m}) entry {a},{a2}"
                    );
                }
            }
        }
    }

    #[test]
    fn rho_odd_6_3() {
        let t = table(6);
        let rho = rho_odd(&t, 6, 3).unwrap();
        assert_eq!(rho.labels(), &[1, 3, 5, 7]);
        let num = [
            [2.0, 2.0, 0.0, 2.0],
            [2.0, 5.0, 3.0, 3.0],
            [0.0, 3.0, 6.0, 2.0],
            [2.0, 3.0, 2.0, 4.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((rho.entry(i, j) - num[i][j] / 17.0).abs() < 1e-15);
            }
        }
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rho_odd_8_2() {
        use crate::counting::pi_ab;
        let t = table(8);
        let rho = rho_odd(&t, 8, 2).unwrap();
        let denom = (t.count_primes_leq(256) - 1) as f64;
        let d11 = pi_ab(&t, 4, 1, 256).unwrap() as f64;
        let d33 = pi_ab(&t, 4, 3, 256).unwrap() as f64;
        assert!((rho.entry(0, 0) - d11 / denom).abs() < 1e-15);
        assert!((rho.entry(1, 1) - d33 / denom).abs() < 1e-15);
    }

    #[test]
    fn truncated_carries_the_nonzero_block() {
        let t = table(10);
        let full = rho_exact(&t, 10, 4).unwrap();
        let trunc = rho_truncated(&t, 10, 4).unwrap();
        assert_eq!(trunc.dim(), (1 << 3) + 1);
        // Every even row other than a=2 is identically zero in the full matrix.
        for (i, &a) in full.labels().iter().enumerate() {
            if a % 2 == 0 && a != 2 {
                for j in 0..full.dim() {
                    assert_eq!(full.entry(i, j), 0.0);
                }
            }
        }
        // Frobenius mass is preserved by dropping zero rows.
        assert!((full.frobenius_sq() - trunc.frobenius_sq()).abs() < 1e-15);
    }

    #[test]
    fn model_matrix_entries() {
        let hl = HlConstants::new(100_000).unwrap();
        let rho = rho_model(&hl, 12, 6, EllMode::LimitOneOverNLog2).unwrap();
        let d = 32;
        assert_eq!(rho.dim(), d);
        let ell_n = 1.0 / (12.0 * std::f64::consts::LN_2);
        assert!((rho.entry(0, 0) - 1.0 / d as f64).abs() < 1e-15);
        assert!((rho.entry(0, 1) - ell_n * hl.c(2) / d as f64).abs() < 1e-15);
        assert!((rho.entry(3, 7) - ell_n * hl.c(8) / d as f64).abs() < 1e-15);
        assert!((ell(30, EllMode::LimitOneOverNLog2).unwrap()
            - 1.0 / (30.0 * std::f64::consts::LN_2))
        .abs()
            < 1e-15);
    }

    #[test]
    fn toeplitz_kernel() {
        let hl = HlConstants::new(100_000).unwrap();
        let m = 5u32;
        let d = 1usize << (m - 1);
        let c = toeplitz_c(&hl, m).unwrap();
        let trace: f64 = (0..d).map(|i| c[i * d + i]).sum();
        assert_eq!(trace, 0.0);
        assert!((c[1] - hl.c(2)).abs() < 1e-15);
        assert!((c[0 * d + 3] - hl.c(6)).abs() < 1e-15);
    }

    #[test]
    fn reduce_natural_mask_matches_rho_exact() {
        let t = table(10);
        let state = build_state(&t, 10, Series::Prime).unwrap();
        let mask = PartitionMask::natural(10, 4).unwrap();
        let red = reduce_mask(&state, &mask).unwrap();
        let exact = rho_exact(&t, 10, 4).unwrap();
        assert_eq!(red.dim(), exact.dim());
        for i in 0..red.dim() {
            for j in 0..red.dim() {
                assert!((red.entry(i, j) - exact.entry(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hadamard_reductions_are_pure() {
        let t = table(8);
        let state = build_state(&t, 8, Series::Hadamard).unwrap();
        for bits in [vec![0u32, 1], vec![3, 5, 6], vec![7]] {
            let rho = reduce_mask(&state, &PartitionMask::new(8, bits).unwrap()).unwrap();
            // Rank one: Tr rho^2 = 1.
            assert!((rho.frobenius_sq() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn toy_matrix() {
        let rho = toy_rho(4, 0.5).unwrap();
        assert!((rho.trace() - 1.0).abs() < 1e-15);
        assert!((rho.entry(0, 1) - 0.125).abs() < 1e-15);
        assert!(toy_rho(4, 1.5).is_err());
        assert!(toy_rho(1, 0.5).is_err());
    }

    #[test]
    fn mertens_recovery() {
        let t = table(16);
        assert_eq!(mertens_overlap_recovered(&t, 4).unwrap(), t.mertens(16).unwrap());
        assert_eq!(mertens_overlap_recovered(&t, 16).unwrap(), t.mertens(1 << 16).unwrap());
    }

    #[test]
    fn dirichlet_norm_behavior() {
        assert!((dirichlet_norm(1, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let z2 = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        let v = dirichlet_norm(20, 1.0).unwrap();
        assert!(v < z2 && z2 - v < 1e-5, "partial zeta(2) {v}");
        // Monotone in n, with a tail bounded on the 2^{-n/2}/(sigma - 1/2) scale.
        let a = dirichlet_norm(20, 0.75).unwrap();
        let b = dirichlet_norm(22, 0.75).unwrap();
        assert!(b > a);
        assert!(b - a < 2.0f64.powf(-10.0) / 0.25);
        assert!(dirichlet_norm(4, 0.5).is_err());
    }

    #[test]
    fn mask_validation() {
        assert!(PartitionMask::new(4, vec![]).is_err());
        assert!(PartitionMask::new(4, vec![0, 1, 2, 3]).is_err());
        assert!(PartitionMask::new(4, vec![4]).is_err());
        let m = PartitionMask::new(6, vec![5, 0, 2]).unwrap();
        assert_eq!(m.a_bits(), &[0, 2, 5]);
        assert_eq!(m.complement().a_bits(), &[1, 3, 4]);
        assert_eq!(m.bit_pattern(), 0b100101);
    }
}
