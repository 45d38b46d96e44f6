//! Builds arrays with both direct constructions and prints them.
//!
//! cargo run --example construct_arrays -- 7 4

use wmra::construct::{choose_method, construct, construct_case_b_base};
use wmra::ndt::ndt;

fn main() {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("K and r are integers"))
        .collect();
    let pairs = match args.as_slice() {
        [k, r] => vec![(*k, *r)],
        _ => vec![(5, 3), (6, 2), (4, 2)],
    };

    for (k, r) in pairs {
        let Some(method) = choose_method(k, r) else {
            println!("K={k} r={r}: no direct construction\n");
            continue;
        };
        let a = construct(k, r, method).unwrap();
        println!(
            "K={k} r={r} via {}: N={} S={} L={}",
            method.name(),
            a.n(),
            a.s(),
            ndt(&a).unwrap()
        );
        println!("{}", a.to_text());
    }

    println!("base array for t=4:");
    print!("{}", construct_case_b_base(4).unwrap().to_text());
}
