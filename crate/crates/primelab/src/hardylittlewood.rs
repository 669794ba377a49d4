//! Hardy-Littlewood constants and the appendix sum laws built on them.
//!
//! C(k) is the pair-correlation constant at gap k: zero for odd k, and
//! `C2 * prod_{p>2, p|k} (p-1)/(p-2)` for even k, so it depends only on the
//! odd square-free radical of k. The appendix machinery works with the same
//! constant under the name alpha and the auxiliary exact-rational function
//! `beta(d) = prod_{p>2, p|d} 1/(p-2)` (zero for even or non-square-free d).

use std::collections::HashMap;
use std::sync::Mutex;

use num_integer::Integer;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which of the paper's Euler products to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProductKind {
    /// `C2 = 2 prod_{p>2} (1 - 1/(p-1)^2)` = 1.3203236316...
    TwinConstant,
    /// `2 alpha^2/alpha_2 = 4 prod_{p>2} (1 + 1/(p-1)^3)` = 4.60192...
    TwoAlphaSqOverAlpha2,
    /// `alpha^2/alpha_2 = 2 prod_{p>2} (1 + 1/(p-1)^3)` = 2.30096...
    AlphaSqOverAlpha2,
    /// `prod_{p>2} (1 + (p-1)^{1-2s})` for integer s >= 2 (Table III).
    OddPowerProduct { s: u32 },
}

/// A truncated Euler product with a certified multiplicative tail bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProductValue {
    pub value: f64,
    /// Absolute bound on |true value - value| from the dropped factors.
    pub tail_bound: f64,
    pub cutoff: u64,
}

/// Evaluate one of the paper's Euler products over odd primes <= cutoff.
///
/// The tail bound comes from `|log prod_{p>cutoff} f(p)| <= sum_{k>cutoff} g(k)`
/// with g the leading term of |log f|, summed over all integers (an
/// overcount) and closed by an integral comparison.
pub fn euler_product(kind: ProductKind, cutoff: u64) -> Result<ProductValue> {
    if cutoff < 3 {
        return Err(Error::Range("euler_product cutoff must be >= 3".into()));
    }
    if let ProductKind::OddPowerProduct { s } = kind {
        if s < 2 {
            return Err(Error::Domain("OddPowerProduct needs s >= 2".into()));
        }
    }
    let odd_primes = simple_odd_primes(cutoff);
    let p_f = cutoff as f64;
    let (prefactor, log_tail) = match kind {
        // sum_{k>P} 1/(k-1)^2 < 1/(P-1)
        ProductKind::TwinConstant => (2.0, 1.0 / (p_f - 1.0)),
        // sum_{k>P} 1/(k-1)^3 < 1/(2 (P-1)^2)
        ProductKind::TwoAlphaSqOverAlpha2 => (4.0, 0.5 / ((p_f - 1.0) * (p_f - 1.0))),
        ProductKind::AlphaSqOverAlpha2 => (2.0, 0.5 / ((p_f - 1.0) * (p_f - 1.0))),
        // sum_{k>P} (k-1)^{1-2s} < (P-1)^{2-2s} / (2s-2)
        ProductKind::OddPowerProduct { s } => {
            (1.0, (p_f - 1.0).powi(2 - 2 * s as i32) / (2.0 * s as f64 - 2.0))
        }
    };
    let mut prod = 1.0f64;
    for &p in &odd_primes {
        let q = (p - 1) as f64;
        let factor = match kind {
            ProductKind::TwinConstant => 1.0 - 1.0 / (q * q),
            ProductKind::TwoAlphaSqOverAlpha2 | ProductKind::AlphaSqOverAlpha2 => {
                1.0 + 1.0 / (q * q * q)
            }
            ProductKind::OddPowerProduct { s } => 1.0 + q.powi(1 - 2 * s as i32),
        };
        prod *= factor;
    }
    let value = prefactor * prod;
    Ok(ProductValue { value, tail_bound: value * log_tail.exp_m1(), cutoff })
}

/// Cached Hardy-Littlewood values at a fixed Euler-product cutoff.
pub struct HlConstants {
    cutoff: u64,
    c2: ProductValue,
    c_cache: Mutex<HashMap<u64, f64>>,
}

impl HlConstants {
    pub fn new(cutoff: u64) -> Result<HlConstants> {
        let c2 = euler_product(ProductKind::TwinConstant, cutoff)?;
        Ok(HlConstants { cutoff, c2, c_cache: Mutex::new(HashMap::new()) })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// The twin-pair constant C2 = C(2).
    pub fn c2(&self) -> f64 {
        self.c2.value
    }

    /// The same constant under the appendix name alpha.
    pub fn alpha(&self) -> f64 {
        self.c2.value
    }

    pub fn c2_tail_bound(&self) -> f64 {
        self.c2.tail_bound
    }

    /// Hardy-Littlewood C(k): 0 for odd k (and k = 0), else C2 times the
    /// product of (p-1)/(p-2) over the odd prime divisors of k.
    pub fn c(&self, k: u64) -> f64 {
        if k == 0 || k % 2 == 1 {
            return 0.0;
        }
        let radical = odd_radical(k);
        if let Some(&v) = self.c_cache.lock().unwrap().get(&radical) {
            return v;
        }
        let mut v = self.c2.value;
        for p in factorize(radical) {
            v *= (p - 1) as f64 / (p - 2) as f64;
        }
        self.c_cache.lock().unwrap().insert(radical, v);
        v
    }

    /// alpha(m) as a floating value: alpha times the rational part.
    pub fn alpha_m(&self, m: u64) -> f64 {
        let r = alpha_m_direct(m);
        self.alpha() * ratio_to_f64(r)
    }

    /// Partial sum of C(k) up to K against the prediction K - (1/2) ln K.
    pub fn sum_c(&self, k_max: u64) -> SumC {
        let sum: f64 = (1..=k_max).map(|k| self.c(k)).sum();
        let predicted = k_max as f64 - 0.5 * (k_max as f64).ln();
        SumC { k_max, sum, predicted, ratio: sum / predicted }
    }

    /// The double sum `sum_{i,j<=d_half} C^2(2|i-j|)` with the three
    /// appendix predictions (component sums and the combined law), each as
    /// a ratio that should approach 1.
    pub fn sum_c2(&self, d_half: u64) -> SumC2 {
        assert!(d_half >= 2);
        let x = (2 * d_half) as f64;
        let log2x = x.ln() * x.ln();
        let a2_over_alpha2 = self.alpha_sq_over_alpha2();

        // C(2i)^2 for i = 1 .. d_half; index 0 unused.
        let csq: Vec<f64> = (0..=d_half).map(|i| self.c(2 * i).powi(2)).collect();
        let double_sum: f64 =
            2.0 * (1..d_half).map(|g| (d_half - g) as f64 * csq[g as usize]).sum::<f64>();

        // Component sums over m <= X of C^2(m) and m C^2(m); odd m vanish.
        let sum_sq: f64 = (1..=d_half).map(|i| csq[i as usize]).sum();
        let sum_m_sq: f64 = (1..=d_half).map(|i| (2 * i) as f64 * csq[i as usize]).sum();

        let pred_sq = a2_over_alpha2 * x - 0.5 * log2x;
        let pred_m_sq = 0.5 * a2_over_alpha2 * x * x;
        let pred_double = 0.5 * a2_over_alpha2 * x * x - 0.5 * x * log2x;
        SumC2 {
            d_half,
            double_sum,
            ratio_component_sq: sum_sq / pred_sq,
            ratio_component_m_sq: sum_m_sq / pred_m_sq,
            ratio_double: double_sum / pred_double,
        }
    }

    /// alpha^2/alpha_2 evaluated at this cutoff.
    pub fn alpha_sq_over_alpha2(&self) -> f64 {
        euler_product(ProductKind::AlphaSqOverAlpha2, self.cutoff)
            .expect("cutoff validated at construction")
            .value
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumC {
    pub k_max: u64,
    pub sum: f64,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumC2 {
    pub d_half: u64,
    pub double_sum: f64,
    /// sum_{m<=X} C^2(m) over (alpha^2/alpha_2) X - (1/2) ln^2 X.
    pub ratio_component_sq: f64,
    /// sum_{m<=X} m C^2(m) over (alpha^2/2 alpha_2) X^2.
    pub ratio_component_m_sq: f64,
    /// The double sum over (alpha^2/2 alpha_2) X^2 - (X/2) ln^2 X.
    pub ratio_double: f64,
}

/// beta(d) as an exact rational: 1 at d = 1, zero for even or
/// non-square-free d, else the product of 1/(p-2) over the primes of d.
pub fn beta(d: u64) -> Ratio<i64> {
    if d == 0 || d % 2 == 0 {
        return Ratio::from_integer(0);
    }
    let mut denom: i64 = 1;
    let mut rem = d;
    let mut p = 3u64;
    while p * p <= rem {
        if rem % p == 0 {
            rem /= p;
            if rem % p == 0 {
                return Ratio::from_integer(0); // not square-free
            }
            denom *= (p - 2) as i64;
        }
        p += 2;
    }
    if rem > 1 {
        denom *= (rem - 2) as i64;
    }
    Ratio::new(1, denom)
}

/// alpha(m) in units of alpha, by the direct product over odd prime
/// divisors: 0 for odd m, else prod (p-1)/(p-2).
pub fn alpha_m_direct(m: u64) -> Ratio<i64> {
    if m % 2 == 1 {
        return Ratio::from_integer(0);
    }
    let mut r = Ratio::from_integer(1);
    for p in factorize(odd_radical(m)) {
        r *= Ratio::new((p - 1) as i64, (p - 2) as i64);
    }
    r
}

/// alpha(m) in units of alpha, by the divisor-sum identity
/// `alpha(m)/alpha = sum_{d|m} beta(d)` (even m; 0 for odd m).
pub fn alpha_m_divisor_sum(m: u64) -> Ratio<i64> {
    if m % 2 == 1 {
        return Ratio::from_integer(0);
    }
    divisors(m).into_iter().map(beta).sum()
}

/// Partial sum of beta(d)/d up to D; converges to 2/alpha.
pub fn sum_beta_over_d(d_max: u64) -> f64 {
    (1..=d_max).map(|d| ratio_to_f64(beta(d)) / d as f64).sum()
}

/// Average of d*beta(d) over d <= D; converges to 1/alpha.
pub fn mean_d_beta(d_max: u64) -> f64 {
    let total: f64 = (1..=d_max).map(|d| d as f64 * ratio_to_f64(beta(d))).sum();
    total / d_max as f64
}

/// Double sum of beta(d1) beta(d2)/lcm(d1, d2) over d1, d2 <= D; converges
/// to 2/alpha_2. lcm goes through 128-bit intermediates.
pub fn double_beta_over_lcm(d_max: u64) -> f64 {
    let support: Vec<(u64, f64)> = (1..=d_max)
        .step_by(2)
        .filter_map(|d| {
            let b = beta(d);
            (*b.numer() != 0).then(|| (d, ratio_to_f64(b)))
        })
        .collect();
    let mut total = 0.0f64;
    for &(d1, b1) in &support {
        for &(d2, b2) in &support {
            let g = d1.gcd(&d2);
            let lcm = (d1 as u128 / g as u128) * d2 as u128;
            total += b1 * b2 / lcm as f64;
        }
    }
    total
}

fn ratio_to_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Odd square-free-relevant radical: product of the distinct odd primes of k.
fn odd_radical(k: u64) -> u64 {
    factorize(k).into_iter().filter(|&p| p > 2).product()
}

/// Distinct prime factors by trial division.
fn factorize(mut k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= k {
        if k % p == 0 {
            out.push(p);
            while k % p == 0 {
                k /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if k > 1 {
        out.push(k);
    }
    out
}

fn divisors(m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d != m / d {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out
}

fn simple_odd_primes(cutoff: u64) -> Vec<u64> {
    let n = cutoff as usize + 1;
    let mut is_comp = vec![false; n];
    let mut out = Vec::new();
    for p in 3..n {
        if p % 2 == 1 && !is_comp[p] {
            out.push(p as u64);
            let mut q = p * p;
            while q < n {
                is_comp[q] = true;
                q += 2 * p;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CUTOFF: u64 = 1_000_000;

    #[test]
    fn euler_products_match_pinned_values() {
        let twin = euler_product(ProductKind::TwinConstant, CUTOFF).unwrap();
        assert!((twin.value - 1.3203236316).abs() < 1e-6, "twin {}", twin.value);
        assert!(twin.tail_bound < 1e-5 && twin.tail_bound > 0.0);

        let p391 = euler_product(ProductKind::TwoAlphaSqOverAlpha2, CUTOFF).unwrap();
        assert!((p391.value - 4.60192).abs() < 1e-4, "4.60192 got {}", p391.value);

        let s2 = euler_product(ProductKind::OddPowerProduct { s: 2 }, CUTOFF).unwrap();
        assert!((s2.value - 1.15048076).abs() < 1e-6);
        let s3 = euler_product(ProductKind::OddPowerProduct { s: 3 }, CUTOFF).unwrap();
        assert!((s3.value - 1.03240618).abs() < 1e-6);
    }

    #[test]
    fn c_values() {
        let hl = HlConstants::new(CUTOFF).unwrap();
        assert!((hl.c(2) - 1.32032).abs() < 1e-4);
        assert_eq!(hl.c(3), 0.0);
        assert!((hl.c(6) - 2.0 * hl.c(2)).abs() < 1e-12);
        // Radical invariance: C(2^a r) = C(2r).
        assert_eq!(hl.c(4), hl.c(2));
        assert_eq!(hl.c(12), hl.c(6));
        assert_eq!(hl.c(96), hl.c(6));
        // C(k) >= C2 for even k.
        for k in (2..200).step_by(2) {
            assert!(hl.c(k) >= hl.c2() - 1e-12);
        }
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(1), Ratio::from_integer(1));
        assert_eq!(beta(5), Ratio::new(1, 3));
        assert_eq!(beta(15), Ratio::new(1, 3)); // 1/(3-2) * 1/(5-2)
        assert_eq!(beta(4), Ratio::from_integer(0));
        assert_eq!(beta(9), Ratio::from_integer(0));
        assert_eq!(beta(11), Ratio::new(1, 9));
        assert_eq!(beta(13), Ratio::new(1, 11));
    }

    #[test]
    fn table_iv_rationals() {
        // alpha(m)/alpha for m = 2, 4, ..., 14 and the running sum.
        let expect = [(2u64, 1, 1), (4, 1, 1), (6, 2, 1), (8, 1, 1), (10, 4, 3), (12, 2, 1), (14, 6, 5)];
        let mut running = Ratio::from_integer(0);
        for (m, num, den) in expect {
            let v = alpha_m_direct(m);
            assert_eq!(v, Ratio::new(num, den), "alpha({m})");
            running += v;
        }
        assert_eq!(running, Ratio::new(143, 15)); // sum over m <= 14
    }

    #[test]
    fn divisor_sum_identity() {
        for m in (2..=10_000u64).step_by(2) {
            assert_eq!(alpha_m_direct(m), alpha_m_divisor_sum(m), "m={m}");
        }
        for m in (1..100).step_by(2) {
            assert_eq!(alpha_m_divisor_sum(m), Ratio::from_integer(0));
        }
    }

    #[test]
    fn sum_c_behavior() {
        let hl = HlConstants::new(CUTOFF).unwrap();
        let s = hl.sum_c(4000);
        assert!((s.ratio - 1.0).abs() < 0.01, "ratio {}", s.ratio);
        let s2 = hl.sum_c(2);
        assert!((s2.sum - 1.3203).abs() < 1e-3);

        // Cumulative sums at X = 2, 4, 6, 8, 10 in units of alpha.
        let alpha = hl.alpha();
        let cum: Vec<f64> = [2u64, 4, 6, 8, 10]
            .iter()
            .map(|&x| (1..=x).map(|k| hl.c(k)).sum::<f64>() / alpha)
            .collect();
        let expect = [1.0, 2.0, 4.0, 5.0, 19.0 / 3.0];
        for (got, want) in cum.iter().zip(expect) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn sum_c2_small_and_brute_force() {
        let hl = HlConstants::new(CUTOFF).unwrap();
        let s = hl.sum_c2(2);
        assert!((s.double_sum - 2.0 * hl.c(2).powi(2)).abs() < 1e-12);

        // X = 50: brute-force the component sum directly from Eq.-level products.
        let x = 50u64;
        let brute: f64 = (1..=x).map(|m| hl.c(m).powi(2)).sum();
        let sums = hl.sum_c2(x / 2);
        let pred = hl.alpha_sq_over_alpha2() * x as f64 - 0.5 * (x as f64).ln().powi(2);
        assert!((sums.ratio_component_sq - brute / pred).abs() < 1e-12);

        // Brute-force the double sum at d_half = 40.
        let dh = 40u64;
        let mut direct = 0.0;
        for i in 1..=dh {
            for j in 1..=dh {
                if i != j {
                    direct += hl.c(2 * i.abs_diff(j)).powi(2);
                }
            }
        }
        assert!((hl.sum_c2(dh).double_sum - direct).abs() < 1e-9);
    }

    #[test]
    fn appendix_sum_limits() {
        let hl = HlConstants::new(CUTOFF).unwrap();
        let alpha = hl.alpha();
        // sum beta(d)/d -> 2/alpha within 1e-4 at d <= 1e5.
        assert!((sum_beta_over_d(100_000) - 2.0 / alpha).abs() < 1e-4);
        // <d beta(d)> -> 1/alpha within 2% at d <= 1e5.
        let mean = mean_d_beta(100_000);
        assert!((mean - 1.0 / alpha).abs() / (1.0 / alpha) < 0.02, "mean {mean}");
    }

    #[test]
    fn double_beta_lcm_limit() {
        let hl = HlConstants::new(CUTOFF).unwrap();
        let two_over_alpha2 = 2.0 * hl.alpha_sq_over_alpha2() / hl.alpha().powi(2);
        let got = double_beta_over_lcm(10_000);
        assert!((got - two_over_alpha2).abs() < 1e-3, "{got} vs {two_over_alpha2}");
    }
}
