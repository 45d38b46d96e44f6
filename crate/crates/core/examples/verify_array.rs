//! Verifies an array, then breaks it and shows what the report says.

use wmra::{parse_array, Entry};

const ARRAY: &str = "\
* 1 1 * *
* * 2 1 *
* * * 2 1
1 * * * 2
2 2 * * *
";

fn main() {
    let a = parse_array(ARRAY).unwrap();
    println!(
        "K={} N={} r={} S={} g={}",
        a.k(),
        a.n(),
        a.r(),
        a.s(),
        a.g()
    );
    print!("{}", a.verify());

    for s in 1..=a.s() {
        let sub = a.subarray(s).unwrap();
        let nodes: Vec<usize> = sub.cols.iter().map(|c| c + 1).collect();
        println!(
            "slot {s}: nodes {nodes:?}, integers per row {:?}",
            sub.integers_per_row()
        );
    }

    let mut broken = a.clone();
    broken.set(0, 1, Entry::Slot(2));
    println!("\nafter setting (1,2) to 2:");
    print!("{}", broken.verify());

    let mut starless = a.clone();
    starless.set(2, 0, Entry::Slot(1));
    println!("\nafter replacing a star in row 3:");
    print!("{}", starless.verify());
}
