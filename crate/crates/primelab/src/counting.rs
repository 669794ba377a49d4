//! Prime-counting functions and logarithmic-integral estimates.
//!
//! Covers pi(x), primes in arithmetic progressions pi_ab, prime pairs at a
//! fixed gap pi2 (only the lower member bounded, matching the defining
//! equation literally), same-index progression pairs pi_abb (both members
//! bounded), the integrals Li/Li2, and ratio sweeps of each exact count
//! against its conjectured asymptote.

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hardylittlewood::HlConstants;
use crate::primes::{totient, PrimeTable};

/// Exact count of primes `<= x`.
pub fn pi(table: &PrimeTable, x: u64) -> Result<u64> {
    if x > table.limit() {
        return Err(Error::Range(format!("pi({x}) beyond sieve limit {}", table.limit())));
    }
    Ok(table.count_primes_leq(x))
}

/// Primes `p <= x` of the form `a*n + b` (`n >= 0`), `gcd(a,b) = 1`.
pub fn pi_ab(table: &PrimeTable, a: u64, b: u64, x: u64) -> Result<u64> {
    if a < 1 || b < 1 {
        return Err(Error::Domain("pi_ab requires a >= 1, b >= 1".into()));
    }
    if a.gcd(&b) != 1 {
        return Err(Error::Domain(format!("pi_ab requires gcd({a},{b}) = 1")));
    }
    if x > table.limit() {
        return Err(Error::Range(format!("pi_ab bound {x} beyond sieve limit")));
    }
    let mut count = 0;
    let mut p = b;
    while p <= x {
        if table.is_prime(p) {
            count += 1;
        }
        p += a;
    }
    Ok(count)
}

/// Primes `p <= x` such that `p + k` is also prime. Only `p` is bounded by
/// `x`; odd gaps return 0 by the C(k) = 0 convention.
pub fn pi2(table: &PrimeTable, k: u64, x: u64) -> Result<u64> {
    if k % 2 == 1 {
        return Ok(0);
    }
    if k < 2 {
        return Err(Error::Domain("pi2 requires an even gap k >= 2".into()));
    }
    if x + k >= table.sieved_bound() {
        return Err(Error::Range(format!("pi2 needs primality up to {}", x + k)));
    }
    Ok(table.primes_below(x + 1).filter(|&p| table.is_prime(p + k)).count() as u64)
}

/// Same-index prime pairs `(a*n + b, a*n + b')` with both members `<= x`.
/// Pairs at gap `|b - b'|` that do not share the same `n` are excluded.
pub fn pi_abb(table: &PrimeTable, a: u64, b: u64, b2: u64, x: u64) -> Result<u64> {
    if b == b2 {
        return Err(Error::Domain("pi_abb requires b != b'".into()));
    }
    if a.gcd(&b) != 1 || a.gcd(&b2) != 1 {
        return Err(Error::Domain(format!(
            "pi_abb requires gcd({a},{b}) = gcd({a},{b2}) = 1"
        )));
    }
    if x > table.limit() {
        return Err(Error::Range(format!("pi_abb bound {x} beyond sieve limit")));
    }
    let top = b.max(b2);
    let mut count = 0;
    let mut n = 0u64;
    while a * n + top <= x {
        if table.is_prime(a * n + b) && table.is_prime(a * n + b2) {
            count += 1;
        }
        n += 1;
    }
    Ok(count)
}

/// Li(x) = integral of dt/log t from 2 to x, to ~1e-10 relative accuracy.
pub fn li(x: f64) -> Result<f64> {
    quad_log_power(x, 1)
}

/// Li2(x) = integral of dt/log^2 t from 2 to x.
pub fn li2(x: f64) -> Result<f64> {
    quad_log_power(x, 2)
}

fn quad_log_power(x: f64, power: i32) -> Result<f64> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("logarithmic integral needs x >= 2, got {x}")));
    }
    let f = |t: f64| 1.0 / t.ln().powi(power);
    Ok(adaptive_simpson(&f, 2.0, x, 1e-12))
}

/// Adaptive Simpson with absolute-per-interval tolerance scaled by the
/// interval estimate; the integrands here are smooth and monotone.
pub(crate) fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let tol = rel_tol * whole.abs().max(1.0);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 48)
}

/// One prime-counting query for ratio sweeps against its asymptote.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum CountingQuery {
    /// pi(x) vs Li(x).
    Pi,
    /// pi_ab(a, b, x) vs Li(x)/phi(a).
    PiAb { a: u64, b: u64 },
    /// pi2(k, x) vs C(k) Li2(x).
    Pi2 { k: u64 },
    /// pi_abb(a, b, b', x) vs C(|b-b'|) Li2(x)/phi(a).
    PiAbb { a: u64, b: u64, b2: u64 },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioPoint {
    pub x: u64,
    pub exact: f64,
    pub predicted: f64,
    pub ratio: f64,
}

/// Evaluate the exact count and its predicted asymptote on a grid of bounds.
pub fn asymptotic_ratio(
    table: &PrimeTable,
    hl: &HlConstants,
    query: CountingQuery,
    x_grid: &[u64],
) -> Result<Vec<RatioPoint>> {
    let mut out = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let (exact, predicted) = match query {
            CountingQuery::Pi => (pi(table, x)? as f64, li(x as f64)?),
            CountingQuery::PiAb { a, b } => {
                (pi_ab(table, a, b, x)? as f64, li(x as f64)? / totient(a) as f64)
            }
            CountingQuery::Pi2 { k } => (pi2(table, k, x)? as f64, hl.c(k) * li2(x as f64)?),
            CountingQuery::PiAbb { a, b, b2 } => (
                pi_abb(table, a, b, b2, x)? as f64,
                hl.c(b.abs_diff(b2)) * li2(x as f64)? / totient(a) as f64,
            ),
        };
        out.push(RatioPoint { x, exact, predicted, ratio: exact / predicted });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: u32) -> PrimeTable {
        PrimeTable::build(n).unwrap()
    }

    #[test]
    fn pi_examples() {
        let t = table(6);
        assert_eq!(pi(&t, 16).unwrap(), 6);
        assert_eq!(pi(&t, 1).unwrap(), 0);
        assert_eq!(pi(&t, 64).unwrap(), 18);
        assert!(pi(&t, 65).is_err());
    }

    #[test]
    fn pi_ab_examples() {
        let t = table(6);
        assert_eq!(pi_ab(&t, 8, 3, 64).unwrap(), 5); // {3, 11, 19, 43, 59}
        assert_eq!(pi_ab(&t, 8, 1, 64).unwrap(), 2); // {17, 41}
        assert_eq!(pi_ab(&t, 2, 1, 10).unwrap(), 3); // {3, 5, 7}
        assert!(pi_ab(&t, 8, 6, 64).is_err());
    }

    #[test]
    fn pi2_examples() {
        let t = table(7);
        assert_eq!(pi2(&t, 2, 64).unwrap(), 7);
        assert_eq!(pi2(&t, 3, 10_000_000).unwrap(), 0); // odd gap: no range check needed
        assert_eq!(pi2(&t, 2, 4).unwrap(), 1); // only (3, 5)
    }

    #[test]
    fn pi_abb_examples() {
        let t = table(6);
        assert_eq!(pi_abb(&t, 8, 3, 5, 64).unwrap(), 3); // (3,5) (11,13) (59,61)
        assert_eq!(pi_abb(&t, 8, 1, 5, 64).unwrap(), 0);
        assert_eq!(pi_abb(&t, 8, 1, 7, 64).unwrap(), 2); // (17,23) (41,47)
        assert_eq!(pi_abb(&t, 8, 5, 3, 64).unwrap(), 3); // symmetry
        assert!(pi_abb(&t, 8, 3, 3, 64).is_err());
        assert!(pi_abb(&t, 8, 2, 3, 64).is_err());
    }

    #[test]
    fn progressions_partition_the_odd_primes() {
        // 1 + sum over odd residues of pi_ab(2^m, a, N) = pi(N).
        let t = table(12);
        let x = t.limit();
        for m in 2..=5u32 {
            let big_m = 1u64 << m;
            let total: u64 =
                (1..big_m).step_by(2).map(|a| pi_ab(&t, big_m, a, x).unwrap()).sum();
            assert_eq!(1 + total, pi(&t, x).unwrap(), "m={m}");
        }
    }

    #[test]
    fn li_values() {
        assert_eq!(li2(2.0).unwrap(), 0.0);
        assert!(li(1.5).is_err());
        // Oracle: quadrature of dt/ln t gives 78626.50 at 1e6; pi(1e6) = 78498.
        let ratio = li(1e6).unwrap() / 78498.0;
        assert!((ratio - 1.001637).abs() < 5e-4, "li ratio {ratio}");
        // ell at N = 2^20 is within 15% of 1/(20 ln 2).
        let n20 = (1u64 << 20) as f64;
        let ell = li2(n20).unwrap() / li(n20).unwrap();
        let lim = 1.0 / (20.0 * std::f64::consts::LN_2);
        assert!((ell - lim).abs() / lim < 0.15, "ell {ell} vs {lim}");
    }

    #[test]
    fn ratio_sweeps_trend_to_one() {
        let t = table(20);
        let hl = HlConstants::new(100_000).unwrap();
        let grid: Vec<u64> = (10..=20).map(|k| 1u64 << k).collect();
        let pts = asymptotic_ratio(&t, &hl, CountingQuery::Pi, &grid).unwrap();
        for p in &pts {
            assert!(p.ratio > 0.9 && p.ratio < 1.1, "pi ratio {} at {}", p.ratio, p.x);
        }
        assert!(
            (pts.last().unwrap().ratio - 1.0).abs() < (pts[0].ratio - 1.0).abs(),
            "pi ratio should tighten with x"
        );

        // Gap-6 pairs against C(6) Li2 = 2 C(2) Li2.
        let pts = asymptotic_ratio(&t, &hl, CountingQuery::Pi2 { k: 6 }, &grid).unwrap();
        assert!((pts.last().unwrap().ratio - 1.0).abs() < 0.05);

        // Progression pairs against C(2) Li2 / phi(8).
        let pts =
            asymptotic_ratio(&t, &hl, CountingQuery::PiAbb { a: 8, b: 1, b2: 3 }, &grid).unwrap();
        assert!((pts.last().unwrap().ratio - 1.0).abs() < 0.1);
    }

    #[test]
    fn pi2_monotone_in_x() {
        let t = table(10);
        let mut prev = 0;
        for x in (4..1000).step_by(37) {
            let c = pi2(&t, 2, x).unwrap();
            assert!(c >= prev);
            prev = c;
        }
    }
}
