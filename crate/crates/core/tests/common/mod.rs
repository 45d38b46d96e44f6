#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmra::shuffle::{ChannelMatrix, IvId, PrecodedSlot, SlotPlan};
use wmra::{parse_array, Entry, WmrArray};

/// A (5,5,3,2) array in which slot 1 repeats in row 1 and slot 2 in row 5.
pub const REPEATED_SLOTS: &str = "\
* 1 1 * *
* * 2 1 *
* * * 2 1
1 * * * 2
2 2 * * *
";

/// The printed case-a array for K=5, r=3.
pub const CASE_A_5_3: &str = "\
* 2 1 * *
* * 2 1 *
* * * 2 1
1 * * * 2
2 1 * * *
";

pub const B3: &str = "\
* 2 1
2 * 3
1 3 *
";

pub const C62: &str = "\
* 2 1 * 2 1
2 * 3 2 * 3
1 3 * 1 3 *
";

pub fn array(text: &str) -> WmrArray {
    parse_array(text).expect("fixture parses")
}

/// `(1-based node, 1-based file)` of every integer entry.
pub fn missing_pairs(a: &WmrArray) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for i in 0..a.n() {
        for k in 0..a.k() {
            if let Entry::Slot(_) = a.get(i, k) {
                out.insert((k + 1, i + 1));
            }
        }
    }
    out
}

/// Whether `a/b == c/d`, by cross multiplication.
pub fn frac_eq(a: u64, b: u64, c: u64, d: u64) -> bool {
    u128::from(a) * u128::from(d) == u128::from(c) * u128::from(b)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Outcome of replaying one slot by hand from the plan and precoders.
pub struct SlotCheck {
    pub max_residual: f64,
    pub max_leakage: f64,
    pub decoded: usize,
}

/// Independent replay of a slot: random scalar values, superposition at
/// every receiver, cancellation of what the receiver mapped, division by the
/// effective gain. Leakage is `|h_k^T alpha| / (|h_k| |alpha|)` over the
/// carriers, for each zero-forced receiver `k`.
pub fn replay_slot(
    a: &WmrArray,
    plan: &SlotPlan,
    pre: &PrecodedSlot,
    h: &ChannelMatrix,
    seed: u64,
) -> SlotCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: BTreeMap<IvId, Complex64> = plan
        .items
        .iter()
        .map(|it| {
            let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (it.iv, v)
        })
        .collect();
    let contribution = |rx: usize, iv: IvId| -> Complex64 {
        let p = pre.for_iv(iv).expect("precoder per item");
        p.carriers
            .iter()
            .zip(&p.alpha)
            .map(|(&m, &al)| h.gain(rx, m) * al)
            .sum::<Complex64>()
    };
    let mut check = SlotCheck {
        max_residual: 0.0,
        max_leakage: 0.0,
        decoded: 0,
    };
    for item in &plan.items {
        let p = pre.for_iv(item.iv).unwrap();
        let alpha_norm = p.alpha.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for &k in &item.zero_force {
            let h_norm = p
                .carriers
                .iter()
                .map(|&m| h.gain(k, m).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let leak = contribution(k, item.iv).norm() / (h_norm * alpha_norm);
            check.max_leakage = check.max_leakage.max(leak);
        }
    }
    for &rx in &plan.nodes {
        let Some(want) = plan.items.iter().find(|it| it.intended == rx) else {
            continue;
        };
        let mut y = Complex64::new(0.0, 0.0);
        for (iv, v) in &values {
            y += contribution(rx, *iv) * v;
        }
        for (iv, v) in &values {
            if a.get(iv.n - 1, rx - 1).is_star() {
                y -= contribution(rx, *iv) * v;
            }
        }
        let est = y / contribution(rx, want.iv);
        let truth = values[&want.iv];
        check.max_residual = check.max_residual.max((est - truth).norm() / truth.norm());
        check.decoded += 1;
    }
    check
}
