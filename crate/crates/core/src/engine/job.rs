use super::EngineError;

/// A computation `phi_q = reduce_q(map_q(w_1), ..., map_q(w_N))`.
///
/// Function indices `q` run over `1..=functions()`. `map` must return
/// exactly `iv_len()` values and both stages must be deterministic.
pub trait Job: Send + Sync {
    fn name(&self) -> &str;

    fn functions(&self) -> usize;

    fn iv_len(&self) -> usize;

    fn map(&self, q: usize, file: &[u8]) -> Vec<f64>;

    /// `ivs[n - 1]` is the intermediate value of file `n`.
    fn reduce(&self, q: usize, ivs: &[Vec<f64>]) -> f64;

    /// Intermediate values and outputs are integers; decoded values are
    /// rounded before reduction and outputs compared exactly.
    fn integer_valued(&self) -> bool {
        false
    }
}

/// Words used by the corpus generator and as default keywords.
pub const VOCABULARY: &[&str] = &[
    "map", "reduce", "shuffle", "node", "file", "slot", "channel", "array", "star", "load",
    "antenna", "signal", "noise", "gain", "value", "output", "input", "phase", "code", "relay",
    "delay", "power", "rate", "frame",
];

/// Counts whole-word occurrences of keyword `q` per file and sums them.
#[derive(Debug, Clone)]
pub struct KeywordCount {
    keywords: Vec<String>,
    iv_len: usize,
}

impl KeywordCount {
    pub fn new(keywords: Vec<String>, iv_len: usize) -> Self {
        assert!(iv_len >= 1, "count needs one symbol");
        Self { keywords, iv_len }
    }

    /// Keyword `q` is the `q`-th vocabulary word, wrapping around.
    pub fn with_default_keywords(functions: usize, iv_len: usize) -> Self {
        let keywords = (0..functions)
            .map(|i| VOCABULARY[i % VOCABULARY.len()].to_string())
            .collect();
        Self::new(keywords, iv_len)
    }

    pub fn keyword(&self, q: usize) -> &str {
        &self.keywords[q - 1]
    }
}

pub(crate) fn count_word(file: &[u8], word: &str) -> usize {
    String::from_utf8_lossy(file)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|tok| *tok == word)
        .count()
}

impl Job for KeywordCount {
    fn name(&self) -> &str {
        "keyword-count"
    }

    fn functions(&self) -> usize {
        self.keywords.len()
    }

    fn iv_len(&self) -> usize {
        self.iv_len
    }

    fn map(&self, q: usize, file: &[u8]) -> Vec<f64> {
        let mut iv = vec![0.0; self.iv_len];
        iv[0] = count_word(file, self.keyword(q)) as f64;
        iv
    }

    fn reduce(&self, _q: usize, ivs: &[Vec<f64>]) -> f64 {
        ivs.iter().map(|iv| iv[0]).sum()
    }

    fn integer_valued(&self) -> bool {
        true
    }
}

/// Affine byte hash keyed by `q`: entry `j` of the value for a file is
/// `sum_i (a_qj * b_i * (1 + (i + j) mod 3) + c_qj)`; the output is
/// `sum_n sum_j (j + 1) * v_n[j]`.
///
/// The coefficients are dyadic, so for files below a few megabytes every
/// intermediate sum is exact in `f64`.
#[derive(Debug, Clone)]
pub struct Checksum {
    functions: usize,
    iv_len: usize,
}

impl Checksum {
    pub fn new(functions: usize, iv_len: usize) -> Self {
        assert!(iv_len >= 1);
        Self { functions, iv_len }
    }

    fn coefficients(q: usize, j: usize) -> (f64, f64) {
        let a = 1.0 + ((3 * q + 5 * j) % 7) as f64 / 8.0;
        let c = ((q + 2 * j) % 4) as f64 / 4.0;
        (a, c)
    }
}

impl Job for Checksum {
    fn name(&self) -> &str {
        "checksum"
    }

    fn functions(&self) -> usize {
        self.functions
    }

    fn iv_len(&self) -> usize {
        self.iv_len
    }

    fn map(&self, q: usize, file: &[u8]) -> Vec<f64> {
        (0..self.iv_len)
            .map(|j| {
                let (a, c) = Self::coefficients(q, j);
                file.iter()
                    .enumerate()
                    .map(|(i, &b)| a * f64::from(b) * (1 + (i + j) % 3) as f64 + c)
                    .sum()
            })
            .collect()
    }

    fn reduce(&self, _q: usize, ivs: &[Vec<f64>]) -> f64 {
        ivs.iter()
            .map(|iv| {
                iv.iter()
                    .enumerate()
                    .map(|(j, v)| (j + 1) as f64 * v)
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Name and one-line description of each builtin job.
pub fn builtin_jobs() -> &'static [(&'static str, &'static str)] {
    &[
        (
            "keyword-count",
            "occurrences of keyword q across the corpus (integer)",
        ),
        ("checksum", "affine byte hash keyed by q, summed over files"),
    ]
}

pub fn builtin_job(
    name: &str,
    functions: usize,
    iv_len: usize,
) -> Result<Box<dyn Job>, EngineError> {
    match name {
        "keyword-count" => Ok(Box::new(KeywordCount::with_default_keywords(
            functions, iv_len,
        ))),
        "checksum" => Ok(Box::new(Checksum::new(functions, iv_len))),
        _ => Err(EngineError::UnknownJob {
            name: name.to_string(),
            available: builtin_jobs().iter().map(|(n, _)| n.to_string()).collect(),
        }),
    }
}
