//! Simulates the shuffle of the K=5, r=3 array over one random channel,
//! noiseless and at a few SNRs.

use wmra::construct::construct_case_a;
use wmra::shuffle::{
    design_precoders, gen_channel, plan_slots, simulate_shuffle, IvStore, ShuffleConfig,
};

fn main() {
    let a = construct_case_a(5, 3).unwrap();
    let h = gen_channel(a.k(), 7);

    for plan in plan_slots(&a).unwrap() {
        println!("slot {} (nodes {:?}):", plan.slot, plan.nodes);
        let pre = design_precoders(&plan, &h).unwrap();
        for (item, p) in plan.items.iter().zip(&pre.precoders) {
            println!(
                "  v({},{}) -> node {}: carriers {:?}, nulled at {:?}, gain {:.3}",
                item.iv.q,
                item.iv.n,
                item.intended,
                item.carriers,
                item.zero_force,
                p.effective_gain(&h, item.intended).norm()
            );
        }
    }

    // Noise is divided by the effective gain, so weak gains dominate.
    let ivs = IvStore::random(&a, a.k(), 8, 7);
    for snr_db in [None, Some(40.0), Some(20.0)] {
        let cfg = ShuffleConfig {
            snr_db,
            noise_seed: 11,
            ..ShuffleConfig::default()
        };
        let rep = simulate_shuffle(&a, &h, &ivs, &cfg).unwrap();
        println!(
            "snr {:>8}: max residual {:.2e}, max leakage {:.2e}, L = {}",
            snr_db.map_or("none".into(), |s| format!("{s} dB")),
            rep.max_residual,
            rep.max_leakage,
            rep.ndt
        );
    }
}
