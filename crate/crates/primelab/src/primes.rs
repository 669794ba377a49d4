//! Elementary arithmetic data: primality tables, Moebius values, Mertens
//! sums, Euler's totient, and a deterministic Miller-Rabin check.
//!
//! A [`PrimeTable`] holds one bit per odd integer below `2^n` (plus a few
//! integers of headroom so tuple lookups like `p+2`, `p+6` near the top of
//! the range stay in bounds) and, lazily, a Moebius value per integer.
//! Tables are immutable once built and can be cached to disk.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Integers sieved past the nominal `2^n` limit for tuple lookups.
pub const HEADROOM: u64 = 8;

const CACHE_MAGIC: [u8; 4] = *b"PLS1";
const CACHE_HEADER: usize = 16;

/// Primality and Moebius lookup for all integers below `2^n`.
pub struct PrimeTable {
    n: u32,
    limit: u64,
    /// Bit `i` is the primality of `2*i + 1`, covering `[0, limit + HEADROOM)`.
    odd_bits: Vec<u64>,
    mu: OnceLock<Vec<i8>>,
}

impl PrimeTable {
    /// Sieve all integers below `2^n` (2 <= n <= 30), without touching disk.
    pub fn build(n: u32) -> Result<PrimeTable> {
        if !(2..=30).contains(&n) {
            return Err(Error::Range(format!("sieve qubit count n={n} not in 2..=30")));
        }
        let limit = 1u64 << n;
        let odd_bits = sieve_odd_bitmap(limit + HEADROOM);
        Ok(PrimeTable { n, limit, odd_bits, mu: OnceLock::new() })
    }

    /// Load `sieve_<n>.bin` from `cache_dir`, rebuilding (and rewriting the
    /// cache) silently if the file is missing or corrupt.
    pub fn load_or_build(n: u32, cache_dir: &Path) -> Result<PrimeTable> {
        if !(2..=30).contains(&n) {
            return Err(Error::Range(format!("sieve qubit count n={n} not in 2..=30")));
        }
        let path = cache_path(cache_dir, n);
        if let Some(odd_bits) = read_cache(&path, n) {
            return Ok(PrimeTable { n, limit: 1u64 << n, odd_bits, mu: OnceLock::new() });
        }
        let table = PrimeTable::build(n)?;
        // Cache failures are not fatal; the table is already in memory.
        let _ = fs::create_dir_all(cache_dir);
        let _ = fs::write(&path, encode_cache(n, &table.odd_bits));
        Ok(table)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Nominal table limit `2^n`.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Largest integer (exclusive) with a valid primality flag.
    pub fn sieved_bound(&self) -> u64 {
        self.limit + HEADROOM
    }

    /// Exact primality of `x` for any `x < limit + HEADROOM`.
    pub fn is_prime(&self, x: u64) -> bool {
        debug_assert!(x < self.sieved_bound(), "primality query {x} beyond sieve");
        if x == 2 {
            return true;
        }
        if x < 2 || x % 2 == 0 {
            return false;
        }
        let i = (x / 2) as usize;
        self.odd_bits[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of primes `<= x` (`x <= 2^n`).
    pub fn count_primes_leq(&self, x: u64) -> u64 {
        assert!(x <= self.limit, "count query {x} beyond table limit");
        if x < 2 {
            return 0;
        }
        // Odd primes are bits 1..=(x-1)/2 of the bitmap; bit 0 is the
        // non-prime 1, and the even prime 2 is counted separately.
        let hi = ((x - 1) / 2) as usize; // last odd value <= x is 2*hi + 1
        let full_words = (hi + 1) / 64;
        let mut count: u64 = 1; // the prime 2
        for w in 0..full_words {
            count += self.odd_bits[w].count_ones() as u64;
        }
        let rem = (hi + 1) % 64;
        if rem > 0 {
            let mask = (1u64 << rem) - 1;
            count += (self.odd_bits[full_words] & mask).count_ones() as u64;
        }
        count
    }

    /// Iterator over all primes `< bound` (`bound <= limit + HEADROOM`).
    pub fn primes_below(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        assert!(bound <= self.sieved_bound());
        (2..bound).filter(move |&x| self.is_prime(x))
    }

    /// Moebius value of `a` (`1 <= a < 2^n`); the underlying table is built
    /// on first use by a linear sieve and then shared.
    pub fn mu(&self, a: u64) -> i8 {
        assert!(a >= 1 && a < self.limit, "mu query {a} outside [1, 2^n)");
        self.mu_table()[a as usize]
    }

    /// Exact Mertens sum `M(x) = sum_{a<=x} mu(a)` for `1 <= x <= 2^n - 1`
    /// (and `x = 2^n` itself for n >= 2, where `mu(2^n) = 0`).
    pub fn mertens(&self, x: u64) -> Result<i64> {
        if x < 1 || x > self.limit {
            return Err(Error::Range(format!("mertens argument {x} outside table")));
        }
        let table = self.mu_table();
        let top = x.min(self.limit - 1); // mu(2^n) = 0 for every n >= 2
        Ok((1..=top).map(|a| table[a as usize] as i64).sum())
    }

    fn mu_table(&self) -> &[i8] {
        self.mu.get_or_init(|| moebius_linear_sieve(self.limit as usize))
    }
}

/// Bitmap over odd integers: bit `i` set iff `2*i + 1` is prime, covering
/// `[0, bound)`.
fn sieve_odd_bitmap(bound: u64) -> Vec<u64> {
    let half = bound.div_ceil(2) as usize; // odd values 1, 3, ..., below bound
    let mut bits = vec![!0u64; half.div_ceil(64)];
    let clear = |bits: &mut [u64], i: usize| bits[i / 64] &= !(1u64 << (i % 64));
    clear(&mut bits, 0); // 1 is not prime
    let mut p = 3u64;
    while p * p < bound {
        if bits[(p / 2) as usize / 64] >> ((p / 2) as usize % 64) & 1 == 1 {
            let mut q = p * p;
            while q < bound {
                clear(&mut bits, (q / 2) as usize);
                q += 2 * p;
            }
        }
        p += 2;
    }
    // Mask stray bits past the end so cache checksums are reproducible.
    let rem = half % 64;
    if rem > 0 {
        let last = bits.len() - 1;
        bits[last] &= (1u64 << rem) - 1;
    }
    bits
}

/// Linear (one pass, each composite crossed once) sieve producing mu for
/// every integer in `[0, n)`.
fn moebius_linear_sieve(n: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n];
    if n > 1 {
        mu[1] = 1;
    }
    let mut primes: Vec<usize> = Vec::new();
    let mut composite = vec![false; n];
    for i in 2..n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip >= n {
                break;
            }
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Euler's totient by trial division.
pub fn totient(a: u64) -> u64 {
    assert!(a >= 1, "totient argument must be positive");
    let mut rem = a;
    let mut phi = a;
    let mut p = 2u64;
    while p * p <= rem {
        if rem % p == 0 {
            phi -= phi / p;
            while rem % p == 0 {
                rem /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rem > 1 {
        phi -= phi / rem;
    }
    phi
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Composite,
    ProbablePrime,
}

/// Miller-Rabin with an explicit witness list. With witnesses
/// {2,3,5,7,11,13,17} the verdict is exact for all odd x < 3e14.
pub fn miller_rabin(x: u64, witnesses: &[u64]) -> Result<Verdict> {
    if x <= 2 || x % 2 == 0 {
        return Err(Error::Domain(format!("miller_rabin needs odd x > 2, got {x}")));
    }
    for &a in witnesses {
        if a < 1 || a > x {
            return Err(Error::Domain(format!("witness {a} outside [1, {x}]")));
        }
    }
    let d = (x - 1) >> (x - 1).trailing_zeros();
    let s = (x - 1).trailing_zeros();
    'witness: for &a in witnesses {
        let a = a % x;
        if a == 0 {
            continue;
        }
        let mut y = pow_mod(a, d, x);
        if y == 1 || y == x - 1 {
            continue;
        }
        for _ in 1..s {
            y = mul_mod(y, y, x);
            if y == x - 1 {
                continue 'witness;
            }
        }
        return Ok(Verdict::Composite);
    }
    Ok(Verdict::ProbablePrime)
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn cache_path(dir: &Path, n: u32) -> PathBuf {
    dir.join(format!("sieve_{n}.bin"))
}

/// 16-byte header (magic, n, checksum) + little-endian bitmap words.
fn encode_cache(n: u32, bits: &[u64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(CACHE_HEADER + bits.len() * 8);
    out.extend_from_slice(&CACHE_MAGIC);
    out.extend_from_slice(&n.to_le_bytes());
    out.extend_from_slice(&checksum(bits).to_le_bytes());
    for w in bits {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out
}

fn read_cache(path: &Path, n: u32) -> Option<Vec<u64>> {
    let raw = fs::read(path).ok()?;
    if raw.len() < CACHE_HEADER || raw[..4] != CACHE_MAGIC {
        return None;
    }
    if u32::from_le_bytes(raw[4..8].try_into().unwrap()) != n {
        return None;
    }
    let stored = u64::from_le_bytes(raw[8..16].try_into().unwrap());
    let body = &raw[CACHE_HEADER..];
    if body.len() % 8 != 0 {
        return None;
    }
    let bits: Vec<u64> = body
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let expected_words = (((1u64 << n) + HEADROOM).div_ceil(2) as usize).div_ceil(64);
    if bits.len() != expected_words || checksum(&bits) != stored {
        return None;
    }
    Some(bits)
}

fn checksum(bits: &[u64]) -> u64 {
    // FNV-1a over the words; cheap and stable across platforms.
    let mut h = 0xcbf29ce484222325u64;
    for &w in bits {
        for b in w.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_tables() {
        let t = PrimeTable::build(4).unwrap();
        let primes: Vec<u64> = t.primes_below(16).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(t.count_primes_leq(16), 6);

        let t2 = PrimeTable::build(2).unwrap();
        assert_eq!(t2.primes_below(4).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(t2.count_primes_leq(4), 2);

        let t6 = PrimeTable::build(6).unwrap();
        assert_eq!(t6.count_primes_leq(64), 18);
        assert!(!t6.is_prime(0) && !t6.is_prime(1) && t6.is_prime(2));
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(PrimeTable::build(1).is_err());
        assert!(PrimeTable::build(31).is_err());
    }

    #[test]
    fn cache_roundtrip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let a = PrimeTable::load_or_build(8, dir.path()).unwrap();
        let path = dir.path().join("sieve_8.bin");
        assert!(path.is_file());
        let b = PrimeTable::load_or_build(8, dir.path()).unwrap();
        assert_eq!(a.odd_bits, b.odd_bits);

        // Flip a byte in the body: load must silently rebuild the same table.
        let mut raw = fs::read(&path).unwrap();
        let last = raw.len() - 1;
        raw[last] ^= 0xff;
        fs::write(&path, &raw).unwrap();
        let c = PrimeTable::load_or_build(8, dir.path()).unwrap();
        assert_eq!(a.odd_bits, c.odd_bits);
    }

    #[test]
    fn mertens_values() {
        let t = PrimeTable::build(5).unwrap();
        assert_eq!(t.mertens(1).unwrap(), 1);
        assert_eq!(t.mertens(2).unwrap(), 0);
        assert_eq!(t.mertens(16).unwrap(), -1);
        assert!(t.mertens(0).is_err());
        assert!(t.mertens(33).is_err());
    }

    #[test]
    fn moebius_against_trial_factorization() {
        let t = PrimeTable::build(10).unwrap();
        let brute = |a: u64| -> i8 {
            let mut rem = a;
            let mut s = 0;
            let mut p = 2;
            while p * p <= rem {
                if rem % p == 0 {
                    rem /= p;
                    if rem % p == 0 {
                        return 0;
                    }
                    s += 1;
                }
                p += 1;
            }
            if rem > 1 {
                s += 1;
            }
            if s % 2 == 0 {
                1
            } else {
                -1
            }
        };
        for a in 1..1024 {
            assert_eq!(t.mu(a), brute(a), "mu({a})");
        }
        // mu[p] = -1 on primes, mu[p^2 k] = 0.
        assert_eq!(t.mu(1), 1);
        for p in t.primes_below(32).collect::<Vec<_>>() {
            assert_eq!(t.mu(p), -1);
            assert_eq!(t.mu(p * p), 0);
        }
    }

    #[test]
    fn squarefree_count_matches_mu_support() {
        let t = PrimeTable::build(12).unwrap();
        let lhs: u64 = (1..4096).map(|a| t.mu(a).unsigned_abs() as u64).sum();
        let rhs = (1..4096u64)
            .filter(|&a| {
                let mut p = 2;
                while p * p <= a {
                    if a % (p * p) == 0 {
                        return false;
                    }
                    p += 1;
                }
                true
            })
            .count() as u64;
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn totient_values() {
        assert_eq!(totient(1), 1);
        assert_eq!(totient(4), 2);
        assert_eq!(totient(8), 4);
        for m in 1..=30u32 {
            assert_eq!(totient(1u64 << m), 1u64 << (m - 1));
        }
    }

    #[test]
    fn miller_rabin_examples() {
        assert_eq!(miller_rabin(13, &[2]).unwrap(), Verdict::ProbablePrime);
        assert_eq!(miller_rabin(561, &[2]).unwrap(), Verdict::Composite);
        let ws = [2, 3, 5, 7, 11, 13, 17];
        assert_eq!(miller_rabin((1u64 << 31) - 1, &ws).unwrap(), Verdict::ProbablePrime);
        assert!(miller_rabin(10, &[2]).is_err());
        assert!(miller_rabin(2, &[2]).is_err());
        assert!(miller_rabin(13, &[14]).is_err());
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let t = PrimeTable::build(14).unwrap();
        let ws = [2u64, 3, 5, 7, 11, 13, 17];
        for x in (5..t.limit()).step_by(2) {
            // Witnesses must be proper: drop any >= x - 1.
            let valid: Vec<u64> = ws.iter().copied().filter(|&w| w < x - 1).collect();
            let verdict = miller_rabin(x, &valid).unwrap();
            assert_eq!(verdict == Verdict::ProbablePrime, t.is_prime(x), "x={x}");
        }
    }
}
