use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ShuffleError;
use crate::array::{Entry, WmrArray};

/// Intermediate value of output function `q` on file `n` (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IvId {
    pub q: usize,
    pub n: usize,
}

impl IvId {
    pub fn new(q: usize, n: usize) -> Self {
        Self { q, n }
    }
}

/// One intermediate value delivered in a slot.
///
/// Node labels are 1-based. `carriers` are the slot's transmitters that
/// mapped file `n`; `zero_force` are the other receivers of the slot that
/// did not map it and therefore cannot cancel it locally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IvSpec {
    pub iv: IvId,
    pub carriers: Vec<usize>,
    pub intended: usize,
    pub zero_force: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotPlan {
    pub slot: usize,
    /// Transmitters, which are also the receivers (full duplex).
    pub nodes: Vec<usize>,
    pub items: Vec<IvSpec>,
}

impl SlotPlan {
    pub fn tx_set(&self) -> &[usize] {
        &self.nodes
    }

    pub fn rx_set(&self) -> &[usize] {
        &self.nodes
    }

    pub fn item_for(&self, receiver: usize) -> Option<&IvSpec> {
        self.items.iter().find(|it| it.intended == receiver)
    }

    /// The same plan for output functions `q + round * K`, used when each
    /// node computes more than one function.
    pub fn shifted(&self, round: usize, k: usize) -> SlotPlan {
        let mut out = self.clone();
        for item in &mut out.items {
            item.iv.q += round * k;
        }
        out
    }
}

/// Builds the transmission plan for slot `s` of a verified array.
pub fn plan_slot(a: &WmrArray, s: usize) -> SlotPlan {
    let positions = a.positions_of(s);
    let nodes: Vec<usize> = positions
        .iter()
        .map(|&(_, col)| col)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|c| c + 1)
        .collect();
    let items = positions
        .iter()
        .map(|&(row, col)| {
            let carriers = nodes
                .iter()
                .copied()
                .filter(|&m| a.get(row, m - 1) == Entry::Star)
                .collect();
            let zero_force = nodes
                .iter()
                .copied()
                .filter(|&m| m != col + 1 && a.get(row, m - 1) != Entry::Star)
                .collect();
            IvSpec {
                iv: IvId::new(col + 1, row + 1),
                carriers,
                intended: col + 1,
                zero_force,
            }
        })
        .collect();
    SlotPlan {
        slot: s,
        nodes,
        items,
    }
}

/// One plan per slot `1..=S`.
pub fn plan_slots(a: &WmrArray) -> Result<Vec<SlotPlan>, ShuffleError> {
    let report = a.verify();
    if !report.passed {
        return Err(ShuffleError::InvalidArray(report));
    }
    let (g, r) = (a.g(), a.r());
    let plans: Vec<SlotPlan> = (1..=a.s()).map(|s| plan_slot(a, s)).collect();
    for plan in &plans {
        assert_eq!(plan.nodes.len(), g, "slot {} spans g nodes", plan.slot);
        assert_eq!(plan.items.len(), g, "slot {} carries g values", plan.slot);
        for &k in &plan.nodes {
            let hits = plan.items.iter().filter(|it| it.intended == k).count();
            assert_eq!(hits, 1, "node {k} receives once in slot {}", plan.slot);
        }
        for item in &plan.items {
            assert!(
                item.zero_force.len() < r.max(1),
                "A3 bounds zero-force targets"
            );
            if g == 2 * r {
                assert!(
                    item.carriers.len() >= g - r,
                    "A3 bounds carriers from below"
                );
            }
        }
    }
    Ok(plans)
}
