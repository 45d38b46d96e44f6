use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ShuffleError;

/// Identifier of the seeded generator behind [`gen_channel`].
pub const GENERATOR: &str = "chacha8/complex-gaussian";

/// Full-duplex interference channel: `gain(k, m)` is the gain from
/// transmitter `m` to receiver `k` (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    k: usize,
    gains: Vec<Complex64>,
    seed: Option<u64>,
    distribution: String,
}

impl ChannelMatrix {
    pub fn from_gains(rows: Vec<Vec<Complex64>>) -> Result<Self, ShuffleError> {
        let k = rows.len();
        if k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(ShuffleError::Channel(
                "gain matrix must be square and non-empty".into(),
            ));
        }
        let gains: Vec<Complex64> = rows.into_iter().flatten().collect();
        if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(ShuffleError::Channel("gains must be finite".into()));
        }
        Ok(Self {
            k,
            gains,
            seed: None,
            distribution: "imported".into(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn distribution(&self) -> &str {
        &self.distribution
    }

    pub fn gain(&self, rx: usize, tx: usize) -> Complex64 {
        assert!((1..=self.k).contains(&rx) && (1..=self.k).contains(&tx));
        self.gains[(rx - 1) * self.k + (tx - 1)]
    }

    /// Gains from `txs` into receiver `rx`.
    pub fn row_to(&self, rx: usize, txs: &[usize]) -> Vec<Complex64> {
        txs.iter().map(|&m| self.gain(rx, m)).collect()
    }

    /// JSON array of rows, each a list of `[re, im]` pairs.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<[f64; 2]>> = self
            .gains
            .chunks(self.k)
            .map(|row| row.iter().map(|g| [g.re, g.im]).collect())
            .collect();
        serde_json::to_string(&rows).expect("gains serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, ShuffleError> {
        let rows: Vec<Vec<[f64; 2]>> =
            serde_json::from_str(text).map_err(|e| ShuffleError::Channel(e.to_string()))?;
        Self::from_gains(
            rows.into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|[re, im]| Complex64::new(re, im))
                        .collect()
                })
                .collect(),
        )
    }
}

/// I.i.d. circularly-symmetric complex Gaussian gains with unit variance,
/// deterministic in `seed`.
pub fn gen_channel(k: usize, seed: u64) -> ChannelMatrix {
    assert!(k >= 1, "need at least one node");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gains = (0..k * k).map(|_| complex_gaussian(&mut rng)).collect();
    ChannelMatrix {
        k,
        gains,
        seed: Some(seed),
        distribution: "cn(0,1)".into(),
    }
}

/// One `CN(0, 1)` sample.
pub(crate) fn complex_gaussian<R: rand::Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
