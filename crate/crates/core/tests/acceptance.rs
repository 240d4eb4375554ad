//! One line per acceptance criterion; exits non-zero if any fails.
//!
//! `DIAMFAM_SEED` overrides the seed of the randomized criteria.

use diamfam::suite::{run_criterion, CRITERIA};

fn main() {
    let seed = std::env::var("DIAMFAM_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(20_241_016);
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (i, (id, _, _)) in CRITERIA.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        let r = run_criterion(i, seed);
        println!("{}", r.line());
        ran += 1;
        if !r.pass {
            failed += 1;
        }
    }
    println!("\nacceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
