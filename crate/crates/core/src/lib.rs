//! Average maximum teleportation fidelity of quantum repeater networks built
//! from Werner states.
//!
//! Each link of a network shares a Werner state with weight `p` in `[0, 1]`.
//! Teleporting along a path through entanglement swapping reaches fidelity
//! `(1 + Π p_i) / 2`; a pair of nodes uses its best path, and the network is
//! scored by `F^max_avg`, the mean of that best fidelity over all node pairs.
//! A value above 2/3 beats any classical strategy on average.
//!
//! * [`network`]: graphs, canonical families (chain, star, intermediate
//!   flowers, ring, complete) and the edge-list format.
//! * [`fidelity`]: best-path search, `F^max_avg`, effective path length and a
//!   brute-force oracle.
//! * [`analytic`]: closed forms for the canonical families, in `f64` or exact
//!   rationals.
//! * [`scenarios`]: uniform weights, ME-link placements, random weights, fibre
//!   loss, advantage regions and large-`N` tables.
//! * [`sweep`]: tabular output; [`cli`]: the `qnetfid` command line.
//!
//! ```
//! use qnetfid::network::{generate, TopologySpec, WeightAssignment};
//! use qnetfid::fidelity::average_max_fidelity_value;
//!
//! let star = generate(&TopologySpec::star(4), &WeightAssignment::Uniform(0.5)).unwrap();
//! assert!((average_max_fidelity_value(&star).unwrap() - 66.0 / 96.0).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod cli;
pub mod error;
pub mod fidelity;
mod io;
pub mod network;
pub mod scenarios;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use fidelity::{NetworkFidelity, PairFidelity};
pub use network::{Family, Network, TopologySpec, WeightAssignment};
pub use stats::EstimateResult;
pub use sweep::SweepResult;
