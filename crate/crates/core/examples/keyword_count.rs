//! Counts keywords across a small corpus with the K=6, r=2 array and
//! compares every node's answer with a single-machine count.

use wmra::construct::construct_case_b;
use wmra::engine::{
    audit_isolation, computation_load, run_centralized, run_distributed, run_map, KeywordCount,
    RunConfig,
};

fn main() {
    let a = construct_case_b(6, 2).unwrap();
    let files: Vec<Vec<u8>> = [
        "map the file then shuffle the value to the node that needs it",
        "every node maps two files and reduces one keyword",
        "the shuffle sends each missing value once over the channel",
    ]
    .iter()
    .map(|t| t.as_bytes().to_vec())
    .collect();
    let keywords = ["map", "file", "shuffle", "node", "value", "the"];
    let job = KeywordCount::new(keywords.iter().map(|s| s.to_string()).collect(), 8);

    let mapped = run_map(&a, &job, &files).unwrap();
    println!(
        "computation load {}",
        computation_load(&mapped, files.len())
    );

    let run = run_distributed(
        &a,
        &job,
        &files,
        &RunConfig {
            seed: 3,
            snr_db: None,
        },
    )
    .unwrap();
    let central = run_centralized(&job, &files);
    for (out, c) in run.outputs.iter().zip(&central) {
        println!(
            "node {} counts {:>8}: {} (single machine {})",
            out.node,
            format!("{:?}", job.keyword(out.q)),
            out.value,
            c.value
        );
    }
    audit_isolation(&a, &run.nodes, keywords.len()).unwrap();
    println!("{} slots, L = {}", run.report.slot_count, run.report.ndt);
}
