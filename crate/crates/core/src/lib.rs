//! Wireless MapReduce arrays for coded distributed computing.
//!
//! A wireless MapReduce array is an `N x K` grid of stars and slot numbers
//! that fixes, in one object, which node maps which file, which shuffle slot
//! delivers each missing intermediate value, and which nodes transmit
//! together in that slot. This crate builds such arrays, verifies them,
//! converts extended placement delivery arrays into them, simulates the
//! zero-forcing shuffle over a full-duplex interference channel and runs
//! complete Map/Shuffle/Reduce jobs on top.
//!
//! ```
//! use wmra::construct::construct_case_a;
//! use wmra::ndt::{ndt, optimal_ndt};
//!
//! let a = construct_case_a(5, 3).unwrap();
//! assert!(a.verify().passed);
//! assert_eq!(ndt(&a).unwrap(), optimal_ndt(5, 3).unwrap());
//! ```
//!
//! Runnable walkthroughs live under `examples/`.

pub mod array;
pub mod cli;
pub mod construct;
pub mod engine;
pub mod epda;
pub mod ndt;
pub mod report;
pub mod shuffle;

pub use array::{parse_array, Entry, Format, ParseError, WmrArray};
pub use report::{Condition, VerificationReport, Violation};

/// Version string recorded in every JSON document the CLI emits.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
