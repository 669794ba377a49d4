//! Eigendecomposition and entanglement functionals: purity, Renyi and von
//! Neumann entropies (all in bits), the entanglement spectrum with
//! degeneracy grouping, the analytic model of the spectrum, trace powers of
//! the Toeplitz kernel, entropy-scaling fits, majorization, and random
//! bipartition surveys.
//!
//! Dense symmetric eigensolves go through LAPACK's dsyevd (divide and
//! conquer); rows and columns that are exactly zero are pruned first, which
//! matters for the full-flavor matrices whose even rows vanish identically.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counting::{adaptive_simpson, pi, pi_ab, pi_abb};
use crate::error::{Error, Result};
use crate::hardylittlewood::{euler_product, HlConstants, ProductKind};
use crate::primes::PrimeTable;
use crate::statebuilder::{
    build_state, ell, reduce_mask, rho_exact, rho_model, rho_odd, toeplitz_c, DensityMatrix,
    EllMode, Flavor, PartitionMask, Series,
};

extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn dgemm_(
        transa: *const u8,
        transb: *const u8,
        m: *const i32,
        n: *const i32,
        k: *const i32,
        alpha: *const f64,
        a: *const f64,
        lda: *const i32,
        b: *const f64,
        ldb: *const i32,
        beta: *const f64,
        c: *mut f64,
        ldc: *const i32,
    );
}

/// Eigenvalues below this magnitude are treated as exact zeros in entropy
/// sums; the matrices are rank-deficient and round-off makes tiny negatives.
pub const EIGEN_CLAMP: f64 = 1e-14;

/// Descending eigenvalue list of a symmetric matrix.
#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub source_dim: usize,
}

impl Spectrum {
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, source_dim: usize) -> Spectrum {
        eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Spectrum { eigenvalues, source_dim }
    }

    pub fn sum(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }
}

/// All eigenvalues of a dense symmetric matrix, descending.
///
/// The input must be symmetric within 1e-12 of its largest entry. Exactly
/// zero rows/columns are pruned before the LAPACK call and reinserted as
/// zero eigenvalues.
pub fn eig_sym(dim: usize, data: &[f64]) -> Result<Spectrum> {
    assert_eq!(data.len(), dim * dim);
    let max_entry = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..dim {
        for j in (i + 1)..dim {
            if (data[i * dim + j] - data[j * dim + i]).abs() > 1e-12 * max_entry.max(1e-300) {
                return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    let keep: Vec<usize> =
        (0..dim).filter(|&i| (0..dim).any(|j| data[i * dim + j] != 0.0)).collect();
    let k = keep.len();
    if k == 0 {
        return Ok(Spectrum::from_eigenvalues(vec![0.0; dim], dim));
    }
    let mut packed = vec![0.0f64; k * k];
    for (r, &i) in keep.iter().enumerate() {
        for (c, &j) in keep.iter().enumerate() {
            packed[r * k + c] = data[i * dim + j];
        }
    }
    let mut evals = dsyevd(k, &mut packed, false)?;
    evals.resize(dim, 0.0);
    Ok(Spectrum::from_eigenvalues(evals, dim))
}

pub fn spectrum_of(rho: &DensityMatrix) -> Result<Spectrum> {
    eig_sym(rho.dim(), rho.data())
}

/// Eigenvalues (ascending) and column eigenvectors, for reconstruction
/// checks; no pruning.
pub fn eig_sym_with_vectors(dim: usize, data: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a = data.to_vec();
    let evals = dsyevd(dim, &mut a, true)?;
    Ok((evals, a))
}

/// Raw dsyevd driver on row-major symmetric input (symmetry makes the
/// row/column-major distinction immaterial). Returns ascending eigenvalues;
/// with `vectors`, the input buffer is replaced by eigenvectors stored
/// column-major (LAPACK layout: eigenvector k is column k).
fn dsyevd(n: usize, a: &mut [f64], vectors: bool) -> Result<Vec<f64>> {
    let jobz = if vectors { b'V' } else { b'N' };
    let uplo = b'L';
    let ni = n as i32;
    let mut w = vec![0.0f64; n];
    let mut info: i32 = 0;
    // Workspace query.
    let mut work_probe = [0.0f64];
    let mut iwork_probe = [0i32];
    let neg1: i32 = -1;
    unsafe {
        dsyevd_(
            &jobz, &uplo, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(), work_probe.as_mut_ptr(),
            &neg1, iwork_probe.as_mut_ptr(), &neg1, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eig(info));
    }
    let lwork = work_probe[0] as i32;
    let liwork = iwork_probe[0];
    let mut work = vec![0.0f64; lwork as usize];
    let mut iwork = vec![0i32; liwork as usize];
    unsafe {
        dsyevd_(
            &jobz, &uplo, &ni, a.as_mut_ptr(), &ni, w.as_mut_ptr(), work.as_mut_ptr(), &lwork,
            iwork.as_mut_ptr(), &liwork, &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eig(info));
    }
    Ok(w)
}

fn clamped(spec: &Spectrum) -> impl Iterator<Item = f64> + '_ {
    spec.eigenvalues.iter().map(|&l| if l <= EIGEN_CLAMP { 0.0 } else { l })
}

/// Von Neumann entropy in bits; zero eigenvalues contribute nothing.
pub fn vn_entropy(spec: &Spectrum) -> f64 {
    -clamped(spec).filter(|&l| l > 0.0).map(|l| l * l.log2()).sum::<f64>()
}

/// Renyi entropy of the given order, in bits.
pub fn renyi(spec: &Spectrum, order: f64) -> Result<f64> {
    if !(order > 0.0) || order == 1.0 {
        return Err(Error::Domain(format!("Renyi order must be > 0 and != 1, got {order}")));
    }
    let trace_pow: f64 = clamped(spec).filter(|&l| l > 0.0).map(|l| l.powf(order)).sum();
    Ok(trace_pow.log2() / (1.0 - order))
}

/// Tr rho^2 from the matrix entries.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.frobenius_sq()
}

/// The closed counting-function form of the full-flavor purity:
/// `(2 pi(M) - 1 + sum_a pi_{M,a}^2 + sum_{a != a'} pi_{M;a,a'}^2) / pi(N)^2`
/// with the sums over odd residues a, a' < M = 2^m.
pub fn purity_formula_full(table: &PrimeTable, n: u32, m: u32) -> Result<f64> {
    if m < 2 || m >= n {
        return Err(Error::Domain("purity formula needs 2 <= m < n".into()));
    }
    let x = 1u64 << n;
    let big_m = 1u64 << m;
    let pi_n = pi(table, x)? as f64;
    let mut total = (2 * pi(table, big_m)? - 1) as f64;
    for a in (1..big_m).step_by(2) {
        let d = pi_ab(table, big_m, a, x)? as f64;
        total += d * d;
        for a2 in (1..big_m).step_by(2) {
            if a2 != a {
                let v = pi_abb(table, big_m, a, a2, x)? as f64;
                total += v * v;
            }
        }
    }
    Ok(total / (pi_n * pi_n))
}

/// The model purity by its closed form:
/// `(d + ell^2 sum_{i != j} C^2(2|i-j|)) / d^2`.
pub fn purity_formula_model(hl: &HlConstants, n: u32, m: u32, mode: EllMode) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain("model purity needs m >= 2".into()));
    }
    let d = 1u64 << (m - 1);
    let ell_n = ell(n, mode)?;
    let double_sum = hl.sum_c2(d).double_sum;
    Ok((d as f64 + ell_n * ell_n * double_sum) / (d as f64 * d as f64))
}

/// One level of the entanglement spectrum: a representative entanglement
/// energy and its multiplicity under the grouping tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsLevel {
    pub eps: f64,
    pub multiplicity: usize,
}

/// Entanglement energies `eps = -log2 lambda` ascending, grouped into
/// near-degenerate levels: a new group starts when the gap to the previous
/// energy exceeds `group_tol`. Zero (clamped) eigenvalues are skipped.
pub fn ent_spectrum(spec: &Spectrum, group_tol: f64) -> Vec<EpsLevel> {
    let mut eps: Vec<f64> = clamped(spec).filter(|&l| l > 0.0).map(|l| -l.log2()).collect();
    eps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<EpsLevel> = Vec::new();
    for e in eps {
        match out.last_mut() {
            // Group by distance to the representative (lowest) energy.
            Some(level) if e - level.eps <= group_tol => level.multiplicity += 1,
            _ => out.push(EpsLevel { eps: e, multiplicity: 1 }),
        }
    }
    out
}

/// The analytic approximation to the model spectrum: a single top level
/// `lambda_0 = 2^{1-m}(1 + ell 2^m)` plus a tower `lambda_i` with
/// multiplicity 2i.
#[derive(Debug, Clone, Serialize)]
pub struct ModelSpectrum {
    pub m: u32,
    pub ell: f64,
    pub lambda0: f64,
    /// Largest i with total weight lambda_0 + sum 2i lambda_i <= 1.
    pub k_m: u32,
    /// Largest i with tower weight sum 2i lambda_i <= 1 (lambda_0 excluded).
    pub k_tower: u32,
    /// 1 minus the lambda_0-inclusive weight at k_m.
    pub residual: f64,
}

impl ModelSpectrum {
    /// The tower eigenvalue lambda_i (i >= 1).
    pub fn lambda(&self, i: u32) -> f64 {
        let i = i as f64;
        2f64.powi(1 - self.m as i32) * (1.0 + self.ell * 2f64.powi(self.m as i32) / (4.0 * i * i))
    }

    /// Expand into a descending eigenvalue list (lambda_0, then the tower
    /// with its multiplicities) over the d = 2^{m-1} dimensional source.
    pub fn to_spectrum(&self) -> Spectrum {
        let mut vals = vec![self.lambda0];
        for i in 1..=self.k_m {
            vals.extend(std::iter::repeat(self.lambda(i)).take(2 * i as usize));
        }
        let d = 1usize << (self.m - 1);
        vals.resize(d.max(vals.len()), 0.0);
        Spectrum::from_eigenvalues(vals, d)
    }
}

/// Build the analytic model spectrum at block size m with the given ell.
pub fn model_spectrum(m: u32, ell_n: f64) -> Result<ModelSpectrum> {
    if m < 3 {
        return Err(Error::Domain("model_spectrum needs m >= 3".into()));
    }
    let two_1m = 2f64.powi(1 - (m as i32));
    let two_m = 2f64.powi(m as i32);
    let lambda0 = two_1m * (1.0 + ell_n * two_m);
    let lam = |i: f64| two_1m * (1.0 + ell_n * two_m / (4.0 * i * i));
    let count_levels = |start_weight: f64| -> (u32, f64) {
        let mut total = start_weight;
        let mut k = 0u32;
        loop {
            let i = (k + 1) as f64;
            let add = 2.0 * i * lam(i);
            if total + add > 1.0 {
                return (k, total);
            }
            total += add;
            k += 1;
        }
    };
    let (k_m, weight) = count_levels(lambda0);
    let (k_tower, _) = count_levels(0.0);
    Ok(ModelSpectrum { m, ell: ell_n, lambda0, k_m, k_tower, residual: 1.0 - weight })
}

/// kappa_0 = sqrt(3/8), the leading coefficient of k_m ~ kappa_0 2^{m/2}.
pub const KAPPA0: f64 = 0.6123724356957945; // sqrt(3/8)

/// Exact trace of C_m^s with the two asymptotic predictions (zeta form and
/// the conjectured Euler product), all unnormalized (divide by 2^{ms}).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TracePowerC {
    pub m: u32,
    pub s: u32,
    pub exact: f64,
    pub pred_zeta: f64,
    pub pred_product: f64,
}

pub fn trace_power_c(hl: &HlConstants, m: u32, s: u32) -> Result<TracePowerC> {
    if s < 2 {
        return Err(Error::Domain("trace_power_c needs s >= 2".into()));
    }
    let c = toeplitz_c(hl, m)?;
    let d = 1usize << (m - 1);
    let exact = if s == 2 {
        c.iter().map(|v| v * v).sum()
    } else {
        // pow = C^{s-1} by repeated dgemm, then Tr C^s = <pow, C>.
        let mut pow = c.clone();
        for _ in 2..s {
            pow = dgemm_square(d, &pow, &c);
        }
        pow.iter().zip(&c).map(|(a, b)| a * b).sum()
    };
    let scale = 2f64.powi((m * s) as i32);
    let pred_zeta = scale * (1.0 + zeta(2 * s - 1) / 2f64.powi(2 * s as i32 - 1));
    let pred_product =
        scale * euler_product(ProductKind::OddPowerProduct { s }, hl.cutoff())?.value;
    Ok(TracePowerC { m, s, exact, pred_zeta, pred_product })
}

fn dgemm_square(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    // Row-major square product via the column-major BLAS identity
    // (AB)^T = B^T A^T: pass b, a in that order and read the result as
    // row-major.
    let ni = n as i32;
    let one = 1.0f64;
    let zero = 0.0f64;
    let mut out = vec![0.0f64; n * n];
    unsafe {
        dgemm_(
            &b'N', &b'N', &ni, &ni, &ni, &one, b.as_ptr(), &ni, a.as_ptr(), &ni, &zero,
            out.as_mut_ptr(), &ni,
        );
    }
    out
}

/// Riemann zeta at integer argument >= 3, by direct summation with an
/// integral tail correction (accurate to ~1e-15).
pub fn zeta(s: u32) -> f64 {
    assert!(s >= 2);
    let cut = 200_000u64;
    // Smallest terms first to keep the summation error near machine level.
    let head: f64 = (1..=cut).rev().map(|k| (k as f64).powi(-(s as i32))).sum();
    let kf = cut as f64;
    // Euler-Maclaurin tail: integral, half endpoint, first Bernoulli term.
    head + kf.powi(1 - s as i32) / (s as f64 - 1.0) - 0.5 * kf.powi(-(s as i32))
        + s as f64 / 12.0 * kf.powi(-(s as i32) - 1)
}

/// The integral approximation to the model-state entropy at block size m
/// (in bits), with upper limit k = kappa0 2^{m/2} and ell = 1/(2m ln 2).
pub fn analytic_entropy(m: f64) -> f64 {
    let ell_n = 1.0 / (2.0 * m * std::f64::consts::LN_2);
    let two_1m = 2f64.powf(1.0 - m);
    let two_m = 2f64.powf(m);
    let k = KAPPA0 * 2f64.powf(0.5 * m);
    let lam = move |x: f64| two_1m * (1.0 + ell_n * two_m / (4.0 * x * x));
    let integrand = move |x: f64| -2.0 * x * lam(x) * lam(x).log2();
    let lambda0 = two_1m * (1.0 + ell_n * two_m);
    -lambda0 * lambda0.log2() + adaptive_simpson(&integrand, 1.0, k, 1e-12)
}

/// Slope of the analytic entropy over an inclusive m range after removing
/// the (1/4) log2 m term of its known asymptotic form.
pub fn analytic_entropy_slope(m_lo: u32, m_hi: u32) -> f64 {
    let pts: Vec<(f64, f64)> = (m_lo..=m_hi)
        .map(|m| (m as f64, analytic_entropy(m as f64) - 0.25 * (m as f64).log2()))
        .collect();
    fit_line(&pts).0
}

/// Unweighted least-squares line; returns (slope, intercept, slope stderr).
fn fit_line(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss_res: f64 =
        pts.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let stderr = if pts.len() > 2 {
        (ss_res / (n - 2.0) * n / denom).sqrt()
    } else {
        0.0
    };
    (slope, intercept, stderr)
}

/// Result of a linear fit of S(n) against n/2.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// (n/2, S) pairs used in the fit.
    pub points: Vec<(f64, f64)>,
    pub residuals: Vec<f64>,
}

/// Compute S(n) for each n (natural partition m = n/2) and fit a line
/// against n/2.
pub fn entropy_scaling_fit(
    table: &PrimeTable,
    hl: &HlConstants,
    n_list: &[u32],
    series: Series,
    flavor: Flavor,
) -> Result<ScalingFit> {
    if n_list.len() < 3 {
        return Err(Error::Domain("scaling fit needs at least 3 points".into()));
    }
    let points: Vec<(f64, f64)> = n_list
        .par_iter()
        .map(|&n| {
            if n % 2 != 0 {
                return Err(Error::Domain(format!("scaling fit needs even n, got {n}")));
            }
            let m = n / 2;
            let s = natural_partition_entropy(table, hl, n, m, series, flavor)?;
            Ok((m as f64, s))
        })
        .collect::<Result<_>>()?;
    let (slope, intercept, slope_stderr) = fit_line(&points);
    let residuals = points.iter().map(|p| p.1 - slope * p.0 - intercept).collect();
    Ok(ScalingFit { slope, slope_stderr, intercept, points, residuals })
}

/// Von Neumann entropy of one natural-partition reduction.
pub fn natural_partition_entropy(
    table: &PrimeTable,
    hl: &HlConstants,
    n: u32,
    m: u32,
    series: Series,
    flavor: Flavor,
) -> Result<f64> {
    let rho = match flavor {
        Flavor::Full | Flavor::Truncated => match series {
            Series::Prime => rho_exact(table, n, m)?,
            _ => {
                let state = build_state(table, n, series)?;
                reduce_mask(&state, &PartitionMask::natural(n, m)?)?
            }
        },
        Flavor::Odd => rho_odd(table, n, m)?,
        Flavor::Model => rho_model(hl, n, m, EllMode::ExactLiRatio)?,
        Flavor::Toy => return Err(Error::Domain("toy flavor has no series".into())),
    };
    Ok(vn_entropy(&spectrum_of(&rho)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MajorizationVerdict {
    AMajorizesB,
    BMajorizesA,
    Equal,
    Incomparable,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MajorizationResult {
    pub verdict: MajorizationVerdict,
    /// First partial-sum index (0-based) where A's dominance over B fails,
    /// if anywhere.
    pub first_a_violation: Option<usize>,
    /// Likewise for B's dominance over A.
    pub first_b_violation: Option<usize>,
    /// Most negative margin of A's partial sums over B's.
    pub worst_a_margin: f64,
}

/// Compare all descending partial sums of two spectra (zero-padded to a
/// common length) with the given numeric slack per comparison.
pub fn majorization(a: &Spectrum, b: &Spectrum, slack: f64) -> MajorizationResult {
    let len = a.eigenvalues.len().max(b.eigenvalues.len());
    let at = |v: &Spectrum, i: usize| v.eigenvalues.get(i).copied().unwrap_or(0.0);
    let mut ca = 0.0f64;
    let mut cb = 0.0f64;
    let mut first_a = None;
    let mut first_b = None;
    let mut a_strict = false;
    let mut b_strict = false;
    let mut worst = f64::INFINITY;
    for i in 0..len {
        ca += at(a, i);
        cb += at(b, i);
        let diff = ca - cb;
        worst = worst.min(diff);
        if diff < -slack && first_a.is_none() {
            first_a = Some(i);
        }
        if diff > slack && first_b.is_none() {
            first_b = Some(i);
        }
        if diff > slack {
            a_strict = true;
        }
        if diff < -slack {
            b_strict = true;
        }
    }
    let verdict = match (first_a, first_b) {
        (None, None) => MajorizationVerdict::Equal,
        (None, Some(_)) if a_strict => MajorizationVerdict::AMajorizesB,
        (Some(_), None) if b_strict => MajorizationVerdict::BMajorizesA,
        (None, Some(_)) | (Some(_), None) => MajorizationVerdict::Equal,
        (Some(_), Some(_)) => MajorizationVerdict::Incomparable,
    };
    MajorizationResult { verdict, first_a_violation: first_a, first_b_violation: first_b, worst_a_margin: worst }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurveySample {
    pub index: usize,
    /// Block-A bit pattern of the sampled mask.
    pub mask_bits: u64,
    pub entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Survey {
    pub samples: Vec<SurveySample>,
    pub natural_mask_bits: u64,
    pub natural_entropy: f64,
}

/// Sample `count` uniformly random balanced bipartitions (|A| = n/2) from a
/// seeded generator and report their entropies next to the natural
/// partition's.
pub fn random_partition_survey(
    table: &PrimeTable,
    n: u32,
    series: Series,
    count: usize,
    seed: u64,
) -> Result<Survey> {
    if n % 2 != 0 {
        return Err(Error::Domain("survey needs even n".into()));
    }
    if count < 1 {
        return Err(Error::Domain("survey needs count >= 1".into()));
    }
    let state = build_state(table, n, series)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let masks: Vec<PartitionMask> = (0..count)
        .map(|_| {
            let mut bits: Vec<u32> = (0..n).collect();
            bits.shuffle(&mut rng);
            bits.truncate(n as usize / 2);
            PartitionMask::new(n, bits)
        })
        .collect::<Result<_>>()?;
    let samples: Vec<SurveySample> = masks
        .par_iter()
        .enumerate()
        .map(|(index, mask)| {
            let rho = reduce_mask(&state, mask)?;
            let entropy = vn_entropy(&spectrum_of(&rho)?);
            Ok(SurveySample { index, mask_bits: mask.bit_pattern(), entropy })
        })
        .collect::<Result<_>>()?;
    let natural = PartitionMask::natural(n, n / 2)?;
    let rho = reduce_mask(&state, &natural)?;
    let natural_entropy = vn_entropy(&spectrum_of(&rho)?);
    Ok(Survey { samples, natural_mask_bits: natural.bit_pattern(), natural_entropy })
}
