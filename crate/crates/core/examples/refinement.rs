//! Coupled refinement: one fine path per realization, measured at coarser step counts.

use wiener_sausage::montecarlo::{convergence_study, ExperimentConfig, Statistic};

fn main() -> wiener_sausage::Result<()> {
    let cfg = ExperimentConfig {
        steps: vec![64, 256, 1024],
        radii: vec![0.05],
        realizations: 10,
        ..ExperimentConfig::default()
    };
    let study = convergence_study(&cfg)?;
    for (m, k) in study.steps.iter().enumerate() {
        println!("k = {k:5}: median area gap {:.5}", study.median_gap(Statistic::Area, m, 0));
    }
    print!("{}", study.to_csv());
    Ok(())
}
