//! Exact-arithmetic laboratory for the Collatz-like map
//! `f(n) = ⌊n/√2⌋` for even `n` and `⌊n√2⌋` for odd `n`.
//!
//! * [`map`]: the map itself, the generic family `f_α`, orbits and parity statistics
//! * [`cycles`]: cycle detection and range censuses
//! * [`predecessors`]: preimages, Beatty-form classification, back-step trees, gap words
//! * [`qsqrt2`] and [`parity`]: exact `Q(√2)` arithmetic and the parity Markov model
//! * [`duffing`]: the cubic-quintic Duffing oscillator driven by orbits of the map

pub mod cycles;
pub mod duffing;
pub mod isqrt;
pub mod map;
pub mod parity;
pub mod predecessors;
pub mod qsqrt2;

pub use qsqrt2::QSqrt2;

pub use map::{step, BigOrbitState, MapConfig, MapError, OrbitStats};

