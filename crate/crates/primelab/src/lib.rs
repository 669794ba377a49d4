//! A numerical laboratory for the entanglement structure of arithmetic
//! sequences.
//!
//! The core objects are normalized amplitude vectors over `n` qubits whose
//! support encodes a sequence (primes, twin primes, prime triplets, the
//! Moebius function) below `2^n`, and the reduced density matrices obtained
//! by tracing out a subset of the qubits. For the natural bipartition into
//! low and high bits, the reduced matrix of the prime state has closed-form
//! entries in terms of prime-counting functions on arithmetic progressions,
//! and its large-`n` behavior is captured by a Hardy-Littlewood pair
//! correlation model. The crate provides:
//!
//! - [`primes`]: bit-packed sieves with on-disk caching, Moebius/Mertens,
//!   and a Miller-Rabin cross-check;
//! - [`counting`]: prime-counting functions `pi`, `pi(a,b)`, `pi_2(k)` and
//!   their logarithmic-integral asymptotics;
//! - [`hardylittlewood`]: twin-prime-type singular series constants,
//!   certified Euler products, and the correlation sums entering the model;
//! - [`statebuilder`]: amplitude vectors, bipartition masks, and the exact,
//!   truncated, odd-sector, and model density matrices;
//! - [`spectra`]: eigensolves, entropies, entanglement spectra, trace
//!   powers, scaling fits, majorization, and random-bipartition surveys;
//! - [`cli`]: the command layer behind the `primelab` binary.

pub mod cli;
pub mod counting;
pub mod error;
pub mod hardylittlewood;
pub mod primes;
pub mod spectra;
pub mod statebuilder;

pub use error::{Error, Result};
