//! Acceptance run: one line per criterion against the bundled corpus.
//!
//! Exits nonzero only for failures that are not documented as known.

use std::time::Instant;

use goodform::corpus::Corpus;
use goodform::selftest::criteria;

fn main() {
    let corpus = Corpus::builtin();
    corpus.validate().expect("bundled corpus is valid");
    let mut unexpected = 0;
    for c in criteria() {
        let start = Instant::now();
        let outcome = c.run(&corpus);
        println!("{}  ({:.2} s)", outcome.line(), start.elapsed().as_secs_f64());
        if outcome.is_unexpected_failure() {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
