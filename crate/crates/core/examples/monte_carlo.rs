//! A small seeded ensemble; prints the aggregate table as CSV.

use wiener_sausage::montecarlo::{run_experiment, write_aggregate_csv, ExperimentConfig};

fn main() -> wiener_sausage::Result<()> {
    let cfg = ExperimentConfig {
        steps: vec![1024],
        radii: vec![0.1, 0.2, 0.5],
        realizations: 20,
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?;
    write_aggregate_csv(&rows, std::io::stdout().lock())
}
