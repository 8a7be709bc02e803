//! Coupled convergence study on the bang-bang benchmark.
//!
//! ```text
//! cargo run --release --example convergence_study -- 1 4
//! ```

use bangbang_pg::benchmark::{run_convergence_study, table_to_markdown, BenchmarkProblem, StudyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let (lo, hi) = match args.as_slice() {
        [a, b] => (*a, *b),
        [a] => (1, *a),
        _ => (1, 4),
    };
    let mut config = StudyConfig::new(lo..=hi);
    config.parallel = true;
    let start = std::time::Instant::now();
    let table = run_convergence_study(&BenchmarkProblem::default(), &config)?;
    print!("{}", table_to_markdown(&table));
    eprintln!("elapsed: {:.1?}", start.elapsed());
    Ok(())
}
