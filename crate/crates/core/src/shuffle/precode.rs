//! Zero-forcing precoder design.
//!
//! Each intermediate value is sent jointly by its carriers with a precoding
//! vector chosen from the null space of the channels into the receivers that
//! cannot cancel it.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::channel::ChannelMatrix;
use super::plan::{IvId, SlotPlan};
use super::ShuffleError;

/// Largest admissible `|h^T a| / (|h| |a|)` at a zero-forced receiver.
pub const ZERO_FORCE_TOL: f64 = 1e-10;
/// Smallest admissible `|h^T a| / (|h| |a|)` at the intended receiver.
pub const SIGNAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub iv: IvId,
    pub intended: usize,
    pub carriers: Vec<usize>,
    /// Unit norm; `alpha[j]` is the coefficient used by `carriers[j]`.
    pub alpha: Vec<Complex64>,
}

impl Precoder {
    /// `sum_m h[rx, m] * alpha_m` over the carriers.
    pub fn effective_gain(&self, h: &ChannelMatrix, rx: usize) -> Complex64 {
        self.carriers
            .iter()
            .zip(&self.alpha)
            .map(|(&m, &a)| h.gain(rx, m) * a)
            .sum()
    }

    /// Effective gain normalized by the channel and precoder norms.
    pub fn relative_gain(&self, h: &ChannelMatrix, rx: usize) -> f64 {
        let h_norm = self
            .carriers
            .iter()
            .map(|&m| h.gain(rx, m).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let a_norm = norm(&self.alpha);
        if h_norm == 0.0 || a_norm == 0.0 {
            return 0.0;
        }
        self.effective_gain(h, rx).norm() / (h_norm * a_norm)
    }

    /// Coefficient node `m` applies to this value, if it carries it.
    pub fn coefficient(&self, m: usize) -> Option<Complex64> {
        self.carriers
            .iter()
            .position(|&c| c == m)
            .map(|j| self.alpha[j])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodedSlot {
    pub slot: usize,
    pub precoders: Vec<Precoder>,
}

impl PrecodedSlot {
    pub fn for_iv(&self, iv: IvId) -> Option<&Precoder> {
        self.precoders.iter().find(|p| p.iv == iv)
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
}

/// A unit vector `x` with `m x = 0`, taken from the SVD of `m` padded to
/// square. Among (numerically) null right singular vectors the one with the
/// smallest index in the decomposition is chosen. Returns `None` when the
/// null space is trivial.
pub fn null_vector(m: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return None;
    }
    if rows == 0 {
        let mut e = vec![Complex64::new(0.0, 0.0); cols];
        e[0] = Complex64::new(1.0, 0.0);
        return Some(e);
    }
    let size = rows.max(cols);
    let mut square = DMatrix::<Complex64>::zeros(size, cols);
    square.view_mut((0, 0), (rows, cols)).copy_from(m);
    let svd = square.svd(false, true);
    let v_t = svd.v_t?;
    let sigma = &svd.singular_values;
    let scale = sigma.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let tol = scale * (size as f64) * 1e-12;
    let j = (0..sigma.len()).find(|&j| sigma[j] <= tol)?;
    // row j of V^H is the conjugate of the j-th right singular vector
    let mut x: Vec<Complex64> = v_t.row(j).iter().map(|c| c.conj()).collect();
    let n = norm(&x);
    if n == 0.0 {
        return None;
    }
    for c in &mut x {
        *c /= n;
    }
    // fix the global phase: first non-negligible coefficient real positive
    if let Some(lead) = x.iter().find(|c| c.norm() > 1e-12).copied() {
        let phase = lead.conj() / lead.norm();
        for c in &mut x {
            *c *= phase;
        }
    }
    Some(x)
}

/// Designs one zero-forcing precoder per item of the slot.
pub fn design_precoders(plan: &SlotPlan, h: &ChannelMatrix) -> Result<PrecodedSlot, ShuffleError> {
    let mut precoders = Vec::with_capacity(plan.items.len());
    for item in &plan.items {
        if item.carriers.len() < item.zero_force.len() + 1 {
            return Err(ShuffleError::InsufficientCarriers {
                slot: plan.slot,
                iv: item.iv,
                carriers: item.carriers.len(),
                targets: item.zero_force.len(),
            });
        }
        let constraints = DMatrix::from_fn(item.zero_force.len(), item.carriers.len(), |i, j| {
            h.gain(item.zero_force[i], item.carriers[j])
        });
        let alpha = null_vector(&constraints).ok_or(ShuffleError::NullSpaceEmpty {
            slot: plan.slot,
            iv: item.iv,
            seed: h.seed(),
        })?;
        let precoder = Precoder {
            iv: item.iv,
            intended: item.intended,
            carriers: item.carriers.clone(),
            alpha,
        };
        for &k in &item.zero_force {
            if precoder.relative_gain(h, k) > ZERO_FORCE_TOL {
                return Err(ShuffleError::NullSpaceEmpty {
                    slot: plan.slot,
                    iv: item.iv,
                    seed: h.seed(),
                });
            }
        }
        if precoder.relative_gain(h, item.intended) < SIGNAL_TOL {
            return Err(ShuffleError::SignalVanished {
                slot: plan.slot,
                iv: item.iv,
                seed: h.seed(),
            });
        }
        precoders.push(precoder);
    }
    Ok(PrecodedSlot {
        slot: plan.slot,
        precoders,
    })
}
