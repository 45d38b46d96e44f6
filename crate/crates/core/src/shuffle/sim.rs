//! Channel-use level simulation of the shuffle phase.
//!
//! Every transmitter builds its signal only from values it holds, and every
//! receiver cancels only values it holds. What a node holds is decided by a
//! [`NodeKnowledge`] implementation, never by the ground-truth store.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::channel::{complex_gaussian, ChannelMatrix, GENERATOR};
use super::plan::{plan_slots, IvId, SlotPlan};
use super::precode::{design_precoders, norm, PrecodedSlot};
use super::ShuffleError;
use crate::array::WmrArray;
use crate::ndt::Rational;

/// Default number of complex symbols per intermediate value.
pub const DEFAULT_SYMBOLS: usize = 8;
/// Largest noiseless relative decoding error considered exact.
pub const DECODE_TOL: f64 = 1e-9;

/// Ground-truth intermediate values, one symbol block per `(q, n)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IvStore {
    values: HashMap<IvId, Vec<Complex64>>,
}

impl IvStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, iv: IvId, block: Vec<Complex64>) {
        self.values.insert(iv, block);
    }

    pub fn get(&self, iv: IvId) -> Option<&[Complex64]> {
        self.values.get(&iv).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Unit-variance random blocks of `symbols` entries for every function
    /// `1..=functions` and every file of `a`.
    pub fn random(a: &WmrArray, functions: usize, symbols: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = Self::new();
        for q in 1..=functions {
            for n in 1..=a.n() {
                let block = (0..symbols).map(|_| complex_gaussian(&mut rng)).collect();
                store.insert(IvId::new(q, n), block);
            }
        }
        store
    }
}

/// What a node can read locally.
pub trait NodeKnowledge: Sync {
    fn known(&self, node: usize, iv: IvId) -> Option<&[Complex64]>;
}

/// Exposes a shared store through the array's Map placement: node `k` knows
/// `(q, n)` exactly when it mapped file `n`.
pub struct PlacementView<'a> {
    array: &'a WmrArray,
    store: &'a IvStore,
}

impl<'a> PlacementView<'a> {
    pub fn new(array: &'a WmrArray, store: &'a IvStore) -> Self {
        Self { array, store }
    }
}

impl NodeKnowledge for PlacementView<'_> {
    fn known(&self, node: usize, iv: IvId) -> Option<&[Complex64]> {
        if self.array.get(iv.n - 1, node - 1).is_star() {
            self.store.get(iv)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ShuffleConfig {
    /// Output functions `Q`; a multiple of `K`. `None` means `Q = K`.
    pub functions: Option<usize>,
    /// Receive SNR in dB with unit transmit power; `None` is noiseless.
    pub snr_db: Option<f64>,
    pub noise_seed: u64,
}

/// One decoded intermediate value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reception {
    pub receiver: usize,
    pub iv: IvId,
    /// `|decoded - sent| / |sent|`.
    pub residual: f64,
    pub signal_coeff_abs: f64,
    /// Largest relative leakage of a zero-forced value into this receiver.
    pub leakage: f64,
    #[serde(skip)]
    pub decoded: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotReport {
    pub slot: usize,
    pub round: usize,
    pub receptions: Vec<Reception>,
}

impl Serialize for SlotReport {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut seq = ser.serialize_seq(Some(self.receptions.len()))?;
        for r in &self.receptions {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShuffleReport {
    pub seed: Option<u64>,
    pub generator: String,
    #[serde(rename = "T")]
    pub symbols: usize,
    pub snr_db: Option<f64>,
    pub ndt: Rational,
    pub max_residual: f64,
    pub max_leakage: f64,
    #[serde(rename = "S")]
    pub slot_count: usize,
    #[serde(rename = "Q")]
    pub functions: usize,
    pub slots: Vec<SlotReport>,
}

impl ShuffleReport {
    pub fn receptions(&self) -> impl Iterator<Item = &Reception> {
        self.slots.iter().flat_map(|s| s.receptions.iter())
    }
}

/// Plans, precodes and simulates the shuffle of `a` over `h` with the
/// values in `ivs`, each node knowing exactly the files it mapped.
pub fn simulate_shuffle(
    a: &WmrArray,
    h: &ChannelMatrix,
    ivs: &IvStore,
    cfg: &ShuffleConfig,
) -> Result<ShuffleReport, ShuffleError> {
    let view = PlacementView::new(a, ivs);
    simulate_with_knowledge(a, h, &view, cfg)
}

/// As [`simulate_shuffle`], with node knowledge supplied by the caller.
pub fn simulate_with_knowledge(
    a: &WmrArray,
    h: &ChannelMatrix,
    knowledge: &dyn NodeKnowledge,
    cfg: &ShuffleConfig,
) -> Result<ShuffleReport, ShuffleError> {
    let k = a.k();
    if h.k() != k {
        return Err(ShuffleError::Channel(format!(
            "channel has {} nodes, array has {k}",
            h.k()
        )));
    }
    let functions = cfg.functions.unwrap_or(k);
    if functions == 0 || !functions.is_multiple_of(k) {
        return Err(ShuffleError::FunctionCount {
            functions,
            nodes: k,
        });
    }
    let plans = plan_slots(a)?;
    let precoded = plans
        .iter()
        .map(|p| design_precoders(p, h))
        .collect::<Result<Vec<_>, _>>()?;

    let rounds = functions / k;
    let tasks: Vec<(usize, usize)> = (0..rounds)
        .flat_map(|round| (0..plans.len()).map(move |idx| (round, idx)))
        .collect();
    let noise_std = cfg.snr_db.map(|db| 10f64.powf(-db / 20.0));

    let slots = tasks
        .par_iter()
        .map(|&(round, idx)| {
            let plan = plans[idx].shifted(round, k);
            let seed = slot_seed(cfg.noise_seed, round, plan.slot);
            run_slot(&plan, &precoded[idx], round, h, knowledge, noise_std, seed)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let symbols = slots
        .first()
        .and_then(|s| s.receptions.first())
        .map_or(DEFAULT_SYMBOLS, |r| r.decoded.len());
    let max_residual = slots
        .iter()
        .flat_map(|s| &s.receptions)
        .map(|r| r.residual)
        .fold(0.0, f64::max);
    let max_leakage = slots
        .iter()
        .flat_map(|s| &s.receptions)
        .map(|r| r.leakage)
        .fold(0.0, f64::max);

    Ok(ShuffleReport {
        seed: h.seed(),
        generator: GENERATOR.to_string(),
        symbols,
        snr_db: cfg.snr_db,
        ndt: Rational::new(a.s() as u64, (a.n() * a.k()) as u64),
        max_residual,
        max_leakage,
        slot_count: a.s(),
        functions,
        slots,
    })
}

fn slot_seed(base: u64, round: usize, slot: usize) -> u64 {
    let mix = ((round as u64) << 32 | slot as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    base ^ mix
}

fn lookup(
    knowledge: &dyn NodeKnowledge,
    node: usize,
    iv: IvId,
) -> Result<&[Complex64], ShuffleError> {
    knowledge
        .known(node, iv)
        .ok_or(ShuffleError::MissingIv { node, iv })
}

fn run_slot(
    plan: &SlotPlan,
    precoded: &PrecodedSlot,
    round: usize,
    h: &ChannelMatrix,
    knowledge: &dyn NodeKnowledge,
    noise_std: Option<f64>,
    seed: u64,
) -> Result<SlotReport, ShuffleError> {
    // precoders were designed for round 0; functions shift, carriers do not
    let precoder_of = |item_idx: usize| &precoded.precoders[item_idx];

    let symbols = match plan.items.first() {
        Some(item) => lookup(knowledge, item.carriers[0], item.iv)?.len(),
        None => 0,
    };

    // x_m(s) = sum over values m carries of alpha_{m,q,n} v_{q,n}
    let mut tx_signals: HashMap<usize, Vec<Complex64>> = HashMap::new();
    for &m in plan.tx_set() {
        let mut x = vec![Complex64::new(0.0, 0.0); symbols];
        for (idx, item) in plan.items.iter().enumerate() {
            let Some(coeff) = precoder_of(idx).coefficient(m) else {
                continue;
            };
            let block = lookup(knowledge, m, item.iv)?;
            for (xt, vt) in x.iter_mut().zip(block) {
                *xt += coeff * vt;
            }
        }
        tx_signals.insert(m, x);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut receptions = Vec::with_capacity(plan.items.len());
    for &k in plan.rx_set() {
        // y_k(s) = sum_m h_{k,m} x_m(s) + z_k(s)
        let mut y = vec![Complex64::new(0.0, 0.0); symbols];
        for &m in plan.tx_set() {
            let gain = h.gain(k, m);
            for (yt, xt) in y.iter_mut().zip(&tx_signals[&m]) {
                *yt += gain * xt;
            }
        }
        if let Some(std) = noise_std {
            for yt in &mut y {
                *yt += complex_gaussian(&mut rng) * std;
            }
        }

        let mut desired = None;
        let mut leakage: f64 = 0.0;
        for (idx, item) in plan.items.iter().enumerate() {
            let p = precoder_of(idx);
            if item.intended == k {
                desired = Some(idx);
            } else if item.zero_force.contains(&k) {
                leakage = leakage.max(p.relative_gain(h, k));
            } else {
                // the receiver mapped this file: cancel it
                let block = lookup(knowledge, k, item.iv)?;
                let gain = p.effective_gain(h, k);
                for (yt, vt) in y.iter_mut().zip(block) {
                    *yt -= gain * vt;
                }
            }
        }
        let idx = desired.expect("every receiver of a slot has one intended value");
        let item = &plan.items[idx];
        let gain = precoder_of(idx).effective_gain(h, k);
        let decoded: Vec<Complex64> = y.iter().map(|yt| yt / gain).collect();

        let sent = lookup(knowledge, item.carriers[0], item.iv)?;
        let err: Vec<Complex64> = decoded.iter().zip(sent).map(|(d, v)| d - v).collect();
        let sent_norm = norm(sent);
        let residual = if sent_norm > 0.0 {
            norm(&err) / sent_norm
        } else {
            norm(&err)
        };
        receptions.push(Reception {
            receiver: k,
            iv: item.iv,
            residual,
            signal_coeff_abs: gain.norm(),
            leakage,
            decoded,
        });
    }
    Ok(SlotReport {
        slot: plan.slot,
        round,
        receptions,
    })
}
