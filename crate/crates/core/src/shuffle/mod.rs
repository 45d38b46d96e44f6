//! Shuffle phase over a full-duplex wireless interference channel.
//!
//! Slot `s` is served by the `g` nodes whose columns contain `s`; they all
//! transmit and receive at once. The value for the occurrence of `s` at
//! `(file n, node k)` is sent by the slot's nodes that mapped file `n`,
//! precoded to vanish at the slot's other receivers that did not.

pub mod channel;
pub mod plan;
pub mod precode;
pub mod sim;

use thiserror::Error;

use crate::report::VerificationReport;

pub use channel::{gen_channel, ChannelMatrix, GENERATOR};
pub use plan::{plan_slot, plan_slots, IvId, IvSpec, SlotPlan};
pub use precode::{design_precoders, PrecodedSlot, Precoder, SIGNAL_TOL, ZERO_FORCE_TOL};
pub use sim::{
    simulate_shuffle, simulate_with_knowledge, IvStore, NodeKnowledge, PlacementView, Reception,
    ShuffleConfig, ShuffleReport, SlotReport, DECODE_TOL, DEFAULT_SYMBOLS,
};

#[derive(Debug, Error, PartialEq)]
pub enum ShuffleError {
    #[error("array fails verification:\n{0}")]
    InvalidArray(VerificationReport),
    #[error("slot {slot}, value ({}, {}): {carriers} carriers cannot null {targets} receivers", iv.q, iv.n)]
    InsufficientCarriers {
        slot: usize,
        iv: IvId,
        carriers: usize,
        targets: usize,
    },
    #[error("slot {slot}, value ({}, {}): no zero-forcing precoder (channel seed {seed:?})", iv.q, iv.n)]
    NullSpaceEmpty {
        slot: usize,
        iv: IvId,
        seed: Option<u64>,
    },
    #[error("slot {slot}, value ({}, {}): signal vanishes at the intended receiver (channel seed {seed:?})", iv.q, iv.n)]
    SignalVanished {
        slot: usize,
        iv: IvId,
        seed: Option<u64>,
    },
    #[error("node {node} does not hold value ({}, {})", iv.q, iv.n)]
    MissingIv { node: usize, iv: IvId },
    #[error("{functions} output functions is not a positive multiple of K={nodes}")]
    FunctionCount { functions: usize, nodes: usize },
    #[error("channel: {0}")]
    Channel(String),
}

impl ShuffleError {
    /// Degenerate channel realizations, as opposed to malformed input.
    pub fn is_degenerate_channel(&self) -> bool {
        matches!(
            self,
            ShuffleError::NullSpaceEmpty { .. } | ShuffleError::SignalVanished { .. }
        )
    }
}
