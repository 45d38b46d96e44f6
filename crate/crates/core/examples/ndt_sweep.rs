//! Compares file counts and delivery times of the direct constructions with
//! the C(K, r) files a wired coded scheme needs.

use wmra::cli::sweep_rows;

fn main() {
    let k_max = std::env::args()
        .nth(1)
        .map_or(10, |a| a.parse().expect("K-max is an integer"));
    println!(" K  r  source     N  N_lcw  L");
    for row in sweep_rows(k_max, false) {
        println!(
            "{:2} {:2}  {:7} {:4} {:6}  {} ({:.4})",
            row.k, row.r, row.source, row.n, row.n_lcw, row.ndt, row.ndt_decimal
        );
    }
}
