//! Reads a 2r-regular EPDA, checks it and converts it to an array, then
//! lists the parameters the EPDA family reaches for small K.

use wmra::epda::{corollary1_params, parse_epda, wmra_from_epda};
use wmra::ndt::ndt;

const EPDA: &str = "\
# epda K=6 r=2 N=3 Z=1 S=3 g=4
* 2 1 * 2 1
2 * 3 2 * 3
1 3 * 1 3 *
";

fn main() {
    let e = parse_epda(EPDA).unwrap();
    print!("EPDA check: {}", e.verify());
    let a = wmra_from_epda(&e).unwrap();
    println!("converted array (L = {}):", ndt(&a).unwrap());
    print!("{}", a.to_text_with_header());

    println!("\n K  r    N    S  L");
    for k in [4, 5, 6, 8, 10] {
        for r in 1..=k / 2 {
            let p = corollary1_params(k, r).unwrap();
            println!("{k:2} {r:2} {:4} {:4}  {}", p.n, p.s, p.ndt);
        }
    }
}
