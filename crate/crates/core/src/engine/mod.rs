//! Complete Map, Shuffle and Reduce runs driven by an array.
//!
//! Node `k` maps the files starred in column `k`, computing intermediate
//! values for every output function. It is assigned functions
//! `k, k + K, k + 2K, ...` and receives the values it is missing for them
//! through the simulated shuffle. The outputs are checked against a
//! centralized evaluation of the same job.

pub mod files;
pub mod job;

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::array::WmrArray;
use crate::ndt::Rational;
use crate::report::VerificationReport;
use crate::shuffle::{
    gen_channel, simulate_with_knowledge, IvId, NodeKnowledge, ShuffleConfig, ShuffleError,
    ShuffleReport,
};

pub use files::{generate_corpus, load_files, parse_manifest};
pub use job::{builtin_job, builtin_jobs, Checksum, Job, KeywordCount, VOCABULARY};

/// Relative tolerance for real-valued outputs.
pub const OUTPUT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("array fails verification:\n{0}")]
    InvalidArray(VerificationReport),
    #[error("array has {expected} rows but {found} files were supplied")]
    FileCountMismatch { expected: usize, found: usize },
    #[error("{functions} output functions is not a positive multiple of K={nodes}")]
    FunctionCount { functions: usize, nodes: usize },
    #[error("unknown job {name:?}; builtin jobs: {}", available.join(", "))]
    UnknownJob {
        name: String,
        available: Vec<String>,
    },
    #[error(transparent)]
    Shuffle(#[from] ShuffleError),
    #[error("node {node} lacks value ({}, {}) at reduce time", iv.q, iv.n)]
    MissingReduceInput { node: usize, iv: IvId },
    #[error("io: {0}")]
    Io(String),
    #[error("manifest: {0}")]
    Manifest(String),
}

/// What one node holds over the course of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub id: usize,
    /// Files (1-based) this node maps.
    pub mapped: Vec<usize>,
    /// Output functions (1-based) this node reduces.
    pub assigned: Vec<usize>,
    pub local: BTreeMap<IvId, Vec<f64>>,
    pub received: BTreeMap<IvId, Vec<f64>>,
}

impl NodeState {
    fn input(&self, iv: IvId) -> Option<&Vec<f64>> {
        self.local.get(&iv).or_else(|| self.received.get(&iv))
    }

    fn reduce_inputs(&self, q: usize, files: usize) -> Result<Vec<Vec<f64>>, EngineError> {
        (1..=files)
            .map(|n| {
                let iv = IvId::new(q, n);
                self.input(iv)
                    .cloned()
                    .ok_or(EngineError::MissingReduceInput { node: self.id, iv })
            })
            .collect()
    }
}

fn check_inputs(a: &WmrArray, job: &dyn Job, files: &[Vec<u8>]) -> Result<(), EngineError> {
    if files.len() != a.n() {
        return Err(EngineError::FileCountMismatch {
            expected: a.n(),
            found: files.len(),
        });
    }
    let functions = job.functions();
    if functions == 0 || !functions.is_multiple_of(a.k()) {
        return Err(EngineError::FunctionCount {
            functions,
            nodes: a.k(),
        });
    }
    Ok(())
}

/// Map phase: node `k` computes every function's value on every file it
/// mapped.
pub fn run_map(
    a: &WmrArray,
    job: &dyn Job,
    files: &[Vec<u8>],
) -> Result<Vec<NodeState>, EngineError> {
    check_inputs(a, job, files)?;
    let (k_nodes, functions) = (a.k(), job.functions());
    Ok((1..=k_nodes)
        .into_par_iter()
        .map(|k| {
            let mapped: Vec<usize> = a.mapped_files(k - 1).into_iter().map(|i| i + 1).collect();
            let mut local = BTreeMap::new();
            for &n in &mapped {
                for q in 1..=functions {
                    local.insert(IvId::new(q, n), job.map(q, &files[n - 1]));
                }
            }
            NodeState {
                id: k,
                mapped,
                assigned: (k..=functions).step_by(k_nodes).collect(),
                local,
                received: BTreeMap::new(),
            }
        })
        .collect())
}

/// Measured computation load `sum_k |M_k| / N`.
pub fn computation_load(nodes: &[NodeState], files: usize) -> Rational {
    let total: usize = nodes.iter().map(|n| n.mapped.len()).sum();
    Rational::new(total as u64, files as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeOutput {
    pub node: usize,
    pub q: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CentralOutput {
    pub q: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Seeds the channel; the noise seed is derived from it.
    pub seed: u64,
    pub snr_db: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct DistributedRun {
    pub outputs: Vec<NodeOutput>,
    pub report: ShuffleReport,
    pub nodes: Vec<NodeState>,
}

/// Per-node complex copies of the Map-phase values, for the simulator.
struct MappedSymbols {
    per_node: Vec<HashMap<IvId, Vec<Complex64>>>,
}

impl NodeKnowledge for MappedSymbols {
    fn known(&self, node: usize, iv: IvId) -> Option<&[Complex64]> {
        self.per_node
            .get(node - 1)
            .and_then(|m| m.get(&iv))
            .map(Vec::as_slice)
    }
}

// Real vectors ride on the real axis; decoding keeps the real part.
fn encode(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

fn decode(symbols: &[Complex64], integer: bool) -> Vec<f64> {
    symbols
        .iter()
        .map(|c| if integer { c.re.round() } else { c.re })
        .collect()
}

const NOISE_SEED_SALT: u64 = 0x05EE_D0F4_015E;

/// Runs Map, the simulated Shuffle and Reduce. Outputs are ordered by
/// `(node, q)`.
pub fn run_distributed(
    a: &WmrArray,
    job: &dyn Job,
    files: &[Vec<u8>],
    cfg: &RunConfig,
) -> Result<DistributedRun, EngineError> {
    let report = a.verify();
    if !report.passed {
        return Err(EngineError::InvalidArray(report));
    }
    let mut nodes = run_map(a, job, files)?;

    let symbols = MappedSymbols {
        per_node: nodes
            .iter()
            .map(|n| n.local.iter().map(|(iv, v)| (*iv, encode(v))).collect())
            .collect(),
    };
    let h = gen_channel(a.k(), cfg.seed);
    let shuffle_cfg = ShuffleConfig {
        functions: Some(job.functions()),
        snr_db: cfg.snr_db,
        noise_seed: cfg.seed ^ NOISE_SEED_SALT,
    };
    let report = simulate_with_knowledge(a, &h, &symbols, &shuffle_cfg)?;

    for rec in report.receptions() {
        nodes[rec.receiver - 1]
            .received
            .insert(rec.iv, decode(&rec.decoded, job.integer_valued()));
    }

    let n_files = a.n();
    let outputs = nodes
        .par_iter()
        .map(|node| {
            node.assigned
                .iter()
                .map(|&q| {
                    let ivs = node.reduce_inputs(q, n_files)?;
                    Ok(NodeOutput {
                        node: node.id,
                        q,
                        value: job.reduce(q, &ivs),
                    })
                })
                .collect::<Result<Vec<_>, EngineError>>()
        })
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();

    Ok(DistributedRun {
        outputs,
        report,
        nodes,
    })
}

/// Reference evaluation with every file in one place.
pub fn run_centralized(job: &dyn Job, files: &[Vec<u8>]) -> Vec<CentralOutput> {
    (1..=job.functions())
        .map(|q| {
            let ivs: Vec<Vec<f64>> = files.iter().map(|f| job.map(q, f)).collect();
            CentralOutput {
                q,
                value: job.reduce(q, &ivs),
            }
        })
        .collect()
}

/// True when every function is computed by exactly one node and agrees with
/// the reference: exactly for integer jobs, within [`OUTPUT_TOL`] relative
/// (absolute near zero) otherwise.
pub fn matches_centralized(
    job: &dyn Job,
    outputs: &[NodeOutput],
    central: &[CentralOutput],
) -> bool {
    if outputs.len() != central.len() {
        return false;
    }
    let by_q: BTreeMap<usize, f64> = outputs.iter().map(|o| (o.q, o.value)).collect();
    if by_q.len() != outputs.len() {
        return false;
    }
    central.iter().all(|c| match by_q.get(&c.q) {
        None => false,
        Some(&d) if job.integer_valued() => d == c.value,
        Some(&d) => (d - c.value).abs() <= OUTPUT_TOL * c.value.abs().max(1.0),
    })
}

/// Confirms that every node's locals are exactly its Map-phase values and
/// that it received exactly the values it was missing for its functions.
pub fn audit_isolation(a: &WmrArray, nodes: &[NodeState], functions: usize) -> Result<(), String> {
    for node in nodes {
        let col = node.id - 1;
        for iv in node.local.keys() {
            if !a.get(iv.n - 1, col).is_star() {
                return Err(format!(
                    "node {} holds unmapped ({}, {}) locally",
                    node.id, iv.q, iv.n
                ));
            }
        }
        let expected_local = a.mapped_files(col).len() * functions;
        if node.local.len() != expected_local {
            return Err(format!(
                "node {} has {} locals, expected {expected_local}",
                node.id,
                node.local.len()
            ));
        }
        for iv in node.received.keys() {
            if a.get(iv.n - 1, col).is_star() || !node.assigned.contains(&iv.q) {
                return Err(format!(
                    "node {} received unneeded ({}, {})",
                    node.id, iv.q, iv.n
                ));
            }
        }
        let missing = (a.n() - a.mapped_files(col).len()) * node.assigned.len();
        if node.received.len() != missing {
            return Err(format!(
                "node {} received {} values, expected {missing}",
                node.id,
                node.received.len()
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{construct_case_a, construct_case_b};

    #[test]
    fn map_phase_placement() {
        let a = construct_case_a(5, 3).unwrap();
        let job = KeywordCount::with_default_keywords(5, 8);
        let files = generate_corpus(5, 1);
        let nodes = run_map(&a, &job, &files).unwrap();
        assert_eq!(nodes[0].mapped, vec![1, 2, 3]);
        assert_eq!(computation_load(&nodes, 5), Rational::new(3, 1));
        assert_eq!(nodes[0].local.len(), 15);
    }

    #[test]
    fn tiled_array_mirrors_nodes() {
        let c = construct_case_b(6, 2).unwrap();
        let job = Checksum::new(6, 8);
        let nodes = run_map(&c, &job, &generate_corpus(3, 1)).unwrap();
        assert_eq!(nodes[0].mapped, vec![1]);
        assert_eq!(nodes[3].mapped, vec![1]);
    }

    #[test]
    fn all_star_array_needs_no_shuffle() {
        let a = construct_case_a(4, 4).unwrap();
        let job = KeywordCount::with_default_keywords(4, 8);
        let files = generate_corpus(4, 3);
        let nodes = run_map(&a, &job, &files).unwrap();
        assert_eq!(computation_load(&nodes, 4), Rational::new(4, 1));
        let run = run_distributed(
            &a,
            &job,
            &files,
            &RunConfig {
                seed: 1,
                snr_db: None,
            },
        )
        .unwrap();
        assert!(run.report.slots.is_empty());
        assert!(matches_centralized(
            &job,
            &run.outputs,
            &run_centralized(&job, &files)
        ));
    }

    #[test]
    fn keyword_count_end_to_end() {
        let a = construct_case_a(5, 3).unwrap();
        let job = KeywordCount::with_default_keywords(5, 8);
        let files = generate_corpus(5, 42);
        let run = run_distributed(
            &a,
            &job,
            &files,
            &RunConfig {
                seed: 7,
                snr_db: None,
            },
        )
        .unwrap();
        let central = run_centralized(&job, &files);
        assert!(matches_centralized(&job, &run.outputs, &central));
        assert_eq!(run.outputs.len(), 5);
        for (o, k) in run.outputs.iter().zip(1..) {
            assert_eq!((o.node, o.q), (k, k));
        }
        audit_isolation(&a, &run.nodes, 5).unwrap();
    }

    #[test]
    fn two_functions_per_node() {
        let c = construct_case_b(6, 2).unwrap();
        let job = Checksum::new(12, 8);
        let files = generate_corpus(3, 5);
        let run = run_distributed(
            &c,
            &job,
            &files,
            &RunConfig {
                seed: 2,
                snr_db: None,
            },
        )
        .unwrap();
        assert_eq!(run.nodes[0].assigned, vec![1, 7]);
        assert!(matches_centralized(
            &job,
            &run.outputs,
            &run_centralized(&job, &files)
        ));
        audit_isolation(&c, &run.nodes, 12).unwrap();
    }

    #[test]
    fn input_errors() {
        let a = construct_case_a(5, 3).unwrap();
        let job = KeywordCount::with_default_keywords(5, 8);
        assert!(matches!(
            run_map(&a, &job, &generate_corpus(4, 1)),
            Err(EngineError::FileCountMismatch {
                expected: 5,
                found: 4
            })
        ));
        let odd = KeywordCount::with_default_keywords(7, 8);
        assert!(matches!(
            run_map(&a, &odd, &generate_corpus(5, 1)),
            Err(EngineError::FunctionCount { .. })
        ));
    }

    #[test]
    fn centralized_reference() {
        let job = KeywordCount::new(vec!["a".into(), "b".into()], 4);
        let files = vec![b"a b a".to_vec(), b"".to_vec(), b"b".to_vec()];
        let out = run_centralized(&job, &files);
        assert_eq!(out[0].value, 2.0);
        assert_eq!(out[1].value, 2.0);
        let empty = run_centralized(&job, &[b"".to_vec()]);
        assert!(empty.iter().all(|o| o.value == 0.0));
    }
}
